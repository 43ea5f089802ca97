// cryptoscope command-line front end. Talks to the engine exclusively
// through the shared library's C API; file layout and exit codes live here.
//
// Exit codes: 0 clean, 1 input/infrastructure error, 2 policy gate.

#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cryptoscope.h"

namespace fs = std::filesystem;

namespace {

struct EngineDeleter {
    void operator()(cs_engine* engine) const { cs_engine_free(engine); }
};
struct InventoryDeleter {
    void operator()(cs_inventory* inventory) const { cs_inventory_free(inventory); }
};
using EnginePtr = std::unique_ptr<cs_engine, EngineDeleter>;
using InventoryPtr = std::unique_ptr<cs_inventory, InventoryDeleter>;

std::string take_string(char* text) {
    if (!text) return {};
    std::string out = text;
    cs_string_free(text);
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

struct CommonArgs {
    std::string root;
    std::string manifest;
    std::string mappings;
    std::vector<std::string> policies;
    std::vector<std::string> emit;
    std::string out_dir = ".";
    std::string reference_date;
    double confidence_threshold = 0.5;
    std::string fail_on = "never";
    int jobs = 1;
    std::string inventory_path;  // reuse an existing inventory.json
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool needs_root) {
    auto* root = cmd->add_option("--root", args.root, "Corpus root directory");
    if (needs_root) root->check(CLI::ExistingDirectory);
    cmd->add_option("--manifest", args.manifest, "Repository metadata manifest (CSV or JSON lines)");
    cmd->add_option("--mappings", args.mappings,
                    "Mapping files directory (default: $CRYPTOSCOPE_MAPPINGS, then ./mappings)");
    cmd->add_option("--policy", args.policies, "Policy file; repeatable");
    cmd->add_option("--emit", args.emit, "Extra outputs: utm, intermediate, findings, metrics, csv")
        ->delimiter(',');
    cmd->add_option("--out", args.out_dir, "Output directory (default: .)");
    cmd->add_option("--reference-date", args.reference_date,
                    "Repo-liveness reference date YYYY-MM-DD (default: latest manifest push)");
    cmd->add_option("--confidence-threshold", args.confidence_threshold,
                    "Minimum parseability confidence in [0,1] (default 0.5)");
    cmd->add_option("--fail-on", args.fail_on, "Gate: never | any_fail | regression")
        ->check(CLI::IsMember({"never", "any_fail", "regression"}));
    cmd->add_option("--jobs", args.jobs, "Worker threads (default 1)");
    cmd->add_option("--inventory", args.inventory_path, "Existing inventory.json to reuse");
}

std::string resolve_mappings(const CommonArgs& args) {
    if (!args.mappings.empty()) return args.mappings;
    if (const char* env = std::getenv("CRYPTOSCOPE_MAPPINGS"); env && *env) return env;
    return "mappings";
}

[[noreturn]] void die(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(1);
}

EnginePtr make_engine(const CommonArgs& args, bool with_policies) {
    EnginePtr engine(cs_engine_new());
    if (!engine) die("engine allocation failed");
    if (cs_engine_load_mappings(engine.get(), resolve_mappings(args).c_str()) != CS_OK)
        die(cs_engine_last_error(engine.get()));
    if (!args.reference_date.empty() &&
        cs_engine_set_option(engine.get(), "reference-date", args.reference_date.c_str()) != CS_OK)
        die(cs_engine_last_error(engine.get()));
    if (cs_engine_set_option(engine.get(), "confidence-threshold",
                             std::to_string(args.confidence_threshold).c_str()) != CS_OK)
        die(cs_engine_last_error(engine.get()));
    if (cs_engine_set_option(engine.get(), "jobs", std::to_string(args.jobs).c_str()) != CS_OK)
        die(cs_engine_last_error(engine.get()));
    if (with_policies) {
        if (args.policies.empty()) die("at least one --policy is required");
        for (const std::string& policy : args.policies)
            if (cs_engine_load_policy(engine.get(), policy.c_str()) != CS_OK)
                die(cs_engine_last_error(engine.get()));
    }
    return engine;
}

InventoryPtr build_inventory(cs_engine* engine, const CommonArgs& args) {
    cs_inventory* raw = nullptr;
    if (!args.inventory_path.empty()) {
        std::ifstream in(args.inventory_path, std::ios::binary);
        if (!in) die("cannot read inventory " + args.inventory_path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();
        if (cs_inventory_read_json(engine, text.c_str(), &raw) != CS_OK)
            die(cs_engine_last_error(engine));
        return InventoryPtr(raw);
    }
    if (args.root.empty()) die("--root (or --inventory) is required");
    const cs_status status = cs_engine_discover(
        engine, args.root.c_str(), args.manifest.empty() ? nullptr : args.manifest.c_str(), &raw);
    if (status == CS_ERR_EMPTY) {
        std::cerr << "0 candidate files: " << cs_engine_last_error(engine) << "\n";
        std::exit(1);
    }
    if (status != CS_OK) die(cs_engine_last_error(engine));
    return InventoryPtr(raw);
}

bool emits(const CommonArgs& args, const std::string& kind) {
    for (const std::string& e : args.emit)
        if (e == kind) return true;
    return false;
}

void write_run_log(const CommonArgs& args, const cs_inventory* inventory) {
    // timestamps are confined to the run log; every other output is
    // byte-stable across identical runs
    std::string warnings = take_string(cs_inventory_warnings_text(inventory));
    std::ostringstream log;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    log << "run: " << stamp << "\n";
    log << (warnings.empty() ? "no warnings\n" : warnings);
    write_atomic(fs::path(args.out_dir) / "run.log", log.str());
}

void emit_inventory_outputs(const CommonArgs& args, const cs_inventory* inventory) {
    write_atomic(fs::path(args.out_dir) / "inventory.json",
                 take_string(cs_inventory_to_json(inventory)));
    if (emits(args, "utm"))
        write_atomic(fs::path(args.out_dir) / "utm.json", take_string(cs_inventory_utm_json(inventory)));
    if (emits(args, "intermediate"))
        write_atomic(fs::path(args.out_dir) / "intermediate.json",
                     take_string(cs_inventory_intermediate_json(inventory)));
    write_run_log(args, inventory);
}

int summary_from_inventory(const cs_inventory* inventory, const std::string& what) {
    nlohmann::json doc = nlohmann::json::parse(take_string(cs_inventory_to_json(inventory)));
    std::cout << what << ": " << doc["totals"]["files"].get<int>() << " files, "
              << doc["totals"]["contexts"].get<int>() << " contexts, "
              << doc["totals"]["tls_contexts"].get<int>() << " TLS-enabled\n";
    return doc["totals"]["files"].get<int>();
}

int run_discover(const CommonArgs& args) {
    EnginePtr engine = make_engine(args, false);
    InventoryPtr inventory = build_inventory(engine.get(), args);
    emit_inventory_outputs(args, inventory.get());
    summary_from_inventory(inventory.get(), "discover");
    std::cout << "wrote " << (fs::path(args.out_dir) / "inventory.json").string() << "\n";
    return 0;
}

int run_assess(const CommonArgs& args) {
    EnginePtr engine = make_engine(args, true);
    InventoryPtr inventory = build_inventory(engine.get(), args);
    if (args.inventory_path.empty()) emit_inventory_outputs(args, inventory.get());

    const std::string findings = take_string(cs_engine_assess(engine.get(), inventory.get()));
    if (findings.empty()) die(cs_engine_last_error(engine.get()));
    write_atomic(fs::path(args.out_dir) / "findings.json", findings);

    nlohmann::json doc = nlohmann::json::parse(findings);
    const int fail = doc["summary"]["fail"].get<int>();
    std::cout << "assess: " << doc["summary"]["reports"].get<int>() << " reports, "
              << doc["summary"]["pass"].get<int>() << " pass, " << fail << " fail\n";
    std::cout << "quantum risk: " << doc["summary"]["quantum_risk"].dump() << "\n";
    if (args.fail_on == "any_fail" && fail > 0) return 2;
    return 0;
}

int run_prioritize(const CommonArgs& args) {
    EnginePtr engine = make_engine(args, false);
    InventoryPtr inventory = build_inventory(engine.get(), args);
    const std::string ranked = take_string(cs_engine_prioritize(engine.get(), inventory.get()));
    if (ranked.empty()) die(cs_engine_last_error(engine.get()));
    write_atomic(fs::path(args.out_dir) / "prioritize.json", ranked);

    nlohmann::json doc = nlohmann::json::parse(ranked);
    std::cout << "migration targets (most exposed first):\n";
    for (const auto& target : doc["targets"])
        std::cout << "  " << target["rank"].get<int>() << ". " << target["context_id"].get<std::string>()
                  << " [" << target["risk"].get<std::string>() << "] "
                  << target["rationale"].get<std::string>() << "\n";
    if (doc["targets"].empty()) std::cout << "  (none: every context is quantum-resistant)\n";
    return 0;
}

int run_verify(const CommonArgs& args, const std::string& baseline_path) {
    EnginePtr engine = make_engine(args, true);

    std::ifstream in(baseline_path, std::ios::binary);
    if (!in) die("cannot read baseline inventory " + baseline_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string baseline_text = buffer.str();
    cs_inventory* baseline_raw = nullptr;
    if (cs_inventory_read_json(engine.get(), baseline_text.c_str(), &baseline_raw) != CS_OK)
        die(cs_engine_last_error(engine.get()));
    InventoryPtr baseline(baseline_raw);

    InventoryPtr current = build_inventory(engine.get(), args);
    const std::string diff = take_string(cs_engine_verify(engine.get(), baseline.get(), current.get()));
    if (diff.empty()) die(cs_engine_last_error(engine.get()));
    write_atomic(fs::path(args.out_dir) / "verify.json", diff);

    nlohmann::json doc = nlohmann::json::parse(diff);
    const auto& summary = doc["summary"];
    std::cout << "verify: improved " << summary["improved"].get<int>() << ", regressed "
              << summary["regressed"].get<int>() << ", unchanged " << summary["unchanged"].get<int>()
              << ", added " << summary["added"].get<int>() << ", removed "
              << summary["removed"].get<int>() << "\n";
    for (const auto& change : doc["changes"])
        if (change["change"].get<std::string>() != "unchanged")
            std::cout << "  " << change["change"].get<std::string>() << " "
                      << change["context_id"].get<std::string>() << " ["
                      << change["policy_id"].get<std::string>() << "] "
                      << change["detail"].get<std::string>() << "\n";

    if (args.fail_on == "regression" && summary["regressed"].get<int>() > 0) return 2;
    if (args.fail_on == "any_fail" && doc["current_fail_count"].get<int>() > 0) return 2;
    return 0;
}

int run_stats(const CommonArgs& args) {
    EnginePtr engine = make_engine(args, false);
    InventoryPtr inventory = build_inventory(engine.get(), args);

    const std::string metrics = take_string(cs_engine_metrics(engine.get(), inventory.get()));
    if (metrics.empty()) die(cs_engine_last_error(engine.get()));
    write_atomic(fs::path(args.out_dir) / "metrics.json", metrics);

    const std::string text = take_string(cs_engine_metrics_text(engine.get(), inventory.get()));
    write_atomic(fs::path(args.out_dir) / "metrics.txt", text);

    if (emits(args, "csv")) {
        nlohmann::json csvs =
            nlohmann::json::parse(take_string(cs_engine_metrics_csv(engine.get(), inventory.get())));
        for (const auto& [name, content] : csvs.items())
            write_atomic(fs::path(args.out_dir) / name, content.get<std::string>());
    }
    std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TLS configuration inventory, policy and quantum-readiness analysis"};
    app.require_subcommand(1);

    CommonArgs discover_args, assess_args, prioritize_args, verify_args, stats_args;
    std::string baseline_path;

    auto* discover_cmd =
        app.add_subcommand("discover", "Build the cryptographic inventory from a config corpus");
    add_common_options(discover_cmd, discover_args, true);

    auto* assess_cmd =
        app.add_subcommand("assess", "Evaluate policies and quantum readiness over an inventory");
    add_common_options(assess_cmd, assess_args, false);

    auto* prioritize_cmd =
        app.add_subcommand("prioritize", "Rank migration targets by exposure and key constraints");
    add_common_options(prioritize_cmd, prioritize_args, false);

    auto* verify_cmd =
        app.add_subcommand("verify", "Re-assess and diff against a baseline inventory");
    add_common_options(verify_cmd, verify_args, false);
    verify_cmd->add_option("--baseline", baseline_path, "Baseline inventory.json")->required();

    auto* stats_cmd = app.add_subcommand("stats", "Corpus-level measurement statistics");
    add_common_options(stats_cmd, stats_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (discover_cmd->parsed()) return run_discover(discover_args);
        if (assess_cmd->parsed()) return run_assess(assess_args);
        if (prioritize_cmd->parsed()) return run_prioritize(prioritize_args);
        if (verify_cmd->parsed()) return run_verify(verify_args, baseline_path);
        if (stats_cmd->parsed()) return run_stats(stats_args);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
