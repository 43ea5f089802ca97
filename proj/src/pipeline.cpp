#include "cryptoscope/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "cryptoscope/apache_parser.hpp"
#include "cryptoscope/nginx_parser.hpp"
#include "cryptoscope/normalize.hpp"
#include "cryptoscope/springboot_parser.hpp"

namespace cryptoscope {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct PerEntryResult {
    FileEntry file;
    std::vector<IntermediateConfig> intermediates;
    std::vector<ContextRecord> records;
    std::vector<Warning> warnings;
};

ContextAnalysis analyze_context(const UnifiedTlsModel& utm, const IntermediateConfig& config) {
    ContextAnalysis analysis;

    for (const CipherToken& token : utm.ciphers.suite_tokens) {
        if (token.kind == TokenKind::suite)
            analysis.suite_classifications.push_back(classify_suite(token));
    }
    analysis.cipher_token_count = static_cast<int>(utm.ciphers.suite_tokens.size());
    analysis.explicit_ciphers = utm.ciphers.suite_tokens_set && !utm.ciphers.suite_tokens.empty();
    analysis.legacy_presets = detect_legacy_presets(utm.ciphers.suite_tokens);
    analysis.mixed_strength = detect_mixed_strength(analysis.suite_classifications);
    analysis.context_kex = classify_context_kex(utm);
    analysis.quantum = quantum_readiness(utm);

    for (const std::string& curve : utm.ciphers.ecdh_curves)
        analysis.curves.emplace_back(curve, classify_curve(curve));

    bool engine_directive = config.directives.contains("ssl_engine") ||
                            config.directives.contains("SSLCryptoDevice");
    analysis.key_ref = detect_hsm(utm, engine_directive);

    if (utm.certificates.cert_path) {
        analysis.cert_origin = classify_cert_origin(*utm.certificates.cert_path);
        analysis.cert_chain = classify_cert_chain(*utm.certificates.cert_path);
        analysis.storage_paths.emplace_back(*utm.certificates.cert_path,
                                            classify_storage(*utm.certificates.cert_path));
    }
    if (utm.certificates.key_path)
        analysis.storage_paths.emplace_back(*utm.certificates.key_path,
                                            classify_storage(*utm.certificates.key_path));

    analysis.hostname_class = classify_hostname(utm.endpoint.hostname);

    analysis.mtls = utm.verification.client_auth &&
                    (*utm.verification.client_auth == ClientAuth::optional ||
                     *utm.verification.client_auth == ClientAuth::required);

    if (config.directives.contains("ssl_dhparam")) analysis.has_dhparam = true;
    if (auto it = config.directives.find("SSLOpenSSLConfCmd"); it != config.directives.end()) {
        for (const DirectiveOccurrence& occ : it->second.occurrences) {
            auto args = split_ws(occ.raw_value);
            if (!args.empty() && iequals(args[0], "DHParameters")) analysis.has_dhparam = true;
        }
    }
    return analysis;
}

PerEntryResult process_entry(const CorpusEntry& entry, const RunOptions& options) {
    PerEntryResult result;
    result.file.path = entry.path;
    result.file.content_hash = entry.content_hash;
    result.file.technology = entry.technology_hint;
    result.file.confidence = entry.confidence;
    result.file.repo = entry.repo_meta;

    std::vector<IntermediateConfig> contexts;
    std::optional<ParseError> error;

    switch (entry.technology_hint) {
        case Technology::nginx: {
            ParseOutcome outcome = parse_nginx(entry);
            if (!outcome.ok()) {
                error = outcome.error;
                break;
            }
            ResolveOptions resolve;
            const fs::path root = options.root;
            resolve.loader = [root](const std::string& rel) -> std::optional<std::string> {
                std::ifstream in(root / rel, std::ios::binary);
                if (!in) return std::nullopt;
                std::ostringstream buffer;
                buffer << in.rdbuf();
                return buffer.str();
            };
            contexts = resolve_nginx_contexts(outcome.tree, entry.path, resolve);
            break;
        }
        case Technology::apache: {
            ParseOutcome outcome = parse_apache(entry);
            if (!outcome.ok()) {
                error = outcome.error;
                break;
            }
            contexts = resolve_apache_contexts(outcome.tree, entry.path);
            break;
        }
        case Technology::springboot: {
            SpringParseOutcome outcome = parse_springboot(entry);
            if (!outcome.ok()) {
                error = outcome.error;
                break;
            }
            contexts.push_back(merge_profiles(outcome.documents,
                                              declared_active_profiles(outcome.documents), entry.path));
            break;
        }
        case Technology::unknown:
            result.warnings.push_back(
                {"unknown-technology", "no parser for '" + entry.path + "'", {entry.path, 0, 0}});
            return result;
    }

    if (error) {
        result.warnings.push_back({"parse-error",
                                   entry.path + ":" + std::to_string(error->where.line) + ":" +
                                       std::to_string(error->where.column) + ": " + error->message,
                                   error->where});
        return result;
    }

    result.file.parsed = true;
    result.file.contexts = static_cast<int>(contexts.size());

    auto mapping = options.mappings.find(entry.technology_hint);
    for (IntermediateConfig& config : contexts) {
        for (const Warning& warning : config.warnings) result.warnings.push_back(warning);
        if (!config.tls_enabled) {
            result.intermediates.push_back(config);
            continue;
        }
        ++result.file.tls_contexts;
        result.intermediates.push_back(config);
        if (mapping == options.mappings.end()) {
            result.warnings.push_back({"no-mapping",
                                       "no mapping spec for technology " + to_string(entry.technology_hint),
                                       {entry.path, 0, 0}});
            continue;
        }
        NormalizedContext normalized = normalize(config, mapping->second);
        for (const Warning& finding : normalized.findings) result.warnings.push_back(finding);

        const bool multi_endpoint = normalized.models.size() > 1;
        for (size_t i = 0; i < normalized.models.size(); ++i) {
            UnifiedTlsModel& utm = normalized.models[i];
            ContextRecord record;
            record.context_id = config.context_id;
            if (multi_endpoint && utm.endpoint.port)
                record.context_id += "@" + std::to_string(*utm.endpoint.port);
            record.file = entry.path;
            record.ordinal = config.ordinal;
            record.analysis = analyze_context(utm, config);
            record.utm = std::move(utm);
            if (entry.repo_meta) record.repo_status = entry.repo_meta->status;
            result.records.push_back(std::move(record));
        }
    }
    return result;
}

}  // namespace

std::vector<FileSummary> Inventory::file_summaries() const {
    std::vector<FileSummary> out;
    for (const FileEntry& file : files) {
        FileSummary summary;
        summary.path = file.path;
        summary.technology = file.technology;
        summary.contexts = file.contexts;
        summary.tls_contexts = file.tls_contexts;
        if (file.repo) summary.repo_status = file.repo->status;
        out.push_back(std::move(summary));
    }
    return out;
}

Inventory discover(const RunOptions& options) {
    Inventory inventory;
    inventory.confidence_threshold = options.confidence_threshold;

    // Reference date: explicit option, else the latest manifest push date
    // (never the wall clock).
    CivilDate reference = options.reference_date.value_or(CivilDate{1970, 1, 1});
    std::map<std::string, ManifestRow> manifest;
    if (options.manifest && !options.reference_date) {
        manifest = load_manifest(*options.manifest);
        for (const auto& [path, row] : manifest)
            if (row.last_push > reference) reference = row.last_push;
    }
    inventory.reference_date = reference;

    LoadResult loaded = load_corpus(options.root, options.manifest, reference);
    inventory.warnings = loaded.warnings;

    std::vector<CorpusEntry> entries = dedupe(loaded.entries);

    std::vector<CorpusEntry> selected;
    for (CorpusEntry& entry : entries) {
        if (entry.confidence >= options.confidence_threshold) {
            selected.push_back(std::move(entry));
        } else {
            inventory.warnings.push_back({"below-threshold",
                                          entry.path + " scored " + std::to_string(entry.confidence) +
                                              ", below threshold",
                                          {entry.path, 0, 0}});
        }
    }

    // Parallel per-entry pipeline with deterministic, index-ordered merge.
    std::vector<PerEntryResult> results(selected.size());
    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || selected.size() <= 1) {
        for (size_t i = 0; i < selected.size(); ++i) results[i] = process_entry(selected[i], options);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> workers;
        const size_t worker_count = std::min<size_t>(jobs, selected.size());
        for (size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    const size_t index = next.fetch_add(1);
                    if (index >= selected.size()) break;
                    results[index] = process_entry(selected[index], options);
                }
            });
        }
        for (std::thread& worker : workers) worker.join();
    }

    for (PerEntryResult& result : results) {
        inventory.files.push_back(std::move(result.file));
        for (Warning& warning : result.warnings) inventory.warnings.push_back(std::move(warning));
        for (IntermediateConfig& config : result.intermediates)
            inventory.intermediates.push_back(std::move(config));
        for (ContextRecord& record : result.records) inventory.records.push_back(std::move(record));
    }
    return inventory;
}

AssessmentResult assess(const Inventory& inventory, const std::vector<Policy>& policies) {
    AssessmentResult result;
    for (const ContextRecord& record : inventory.records) {
        for (const Policy& policy : policies) {
            PolicyReport report = evaluate(record.utm, policy, record.context_id);
            if (!report.pass) ++result.fail_count;
            result.reports.push_back(std::move(report));
        }
        result.quantum.emplace_back(record.context_id, record.analysis.quantum);
    }
    return result;
}

std::vector<PrioritizedTarget> prioritize(const Inventory& inventory) {
    struct Keyed {
        PrioritizedTarget target;
        int tier = 0;
        double sensitivity = 0.0;
    };
    std::map<std::string, double> sensitivity_by_file;
    for (const FileEntry& file : inventory.files)
        if (file.repo) sensitivity_by_file[file.path] = file.repo->sensitivity;

    std::vector<Keyed> keyed;
    for (const ContextRecord& record : inventory.records) {
        const QuantumRisk risk = record.analysis.quantum.risk_level;
        if (risk == QuantumRisk::resistant) continue;  // nothing to migrate
        Keyed k;
        k.tier = risk == QuantumRisk::vulnerable_no_fs ? 0 : 1;
        k.sensitivity = sensitivity_by_file.count(record.file) ? sensitivity_by_file[record.file] : 0.0;
        k.target.context_id = record.context_id;
        k.target.risk = risk;
        k.target.hsm_backed = record.analysis.key_ref &&
                              (*record.analysis.key_ref == KeyRefKind::pkcs11_uri ||
                               *record.analysis.key_ref == KeyRefKind::engine_ref);
        k.target.port = record.utm.endpoint.port;
        k.target.sensitivity = k.sensitivity;

        std::string rationale = risk == QuantumRisk::vulnerable_no_fs
                                    ? "RSA key transport: recorded sessions decryptable on key compromise"
                                    : "ephemeral key exchange: forward-secret but quantum-vulnerable";
        if (k.target.hsm_backed)
            rationale += "; HSM-backed key (verify firmware support before migrating)";
        if (k.target.port && *k.target.port == 443) rationale += "; public HTTPS port";
        if (k.sensitivity > 0) rationale += "; operator-flagged sensitive data";
        k.target.rationale = rationale;
        keyed.push_back(std::move(k));
    }

    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.tier != b.tier) return a.tier < b.tier;
        if (a.sensitivity != b.sensitivity) return a.sensitivity > b.sensitivity;
        if (a.target.hsm_backed != b.target.hsm_backed) return !a.target.hsm_backed;  // HSM last
        const bool a443 = a.target.port && *a.target.port == 443;
        const bool b443 = b.target.port && *b.target.port == 443;
        if (a443 != b443) return a443;
        return a.target.context_id < b.target.context_id;
    });

    std::vector<PrioritizedTarget> targets;
    for (size_t i = 0; i < keyed.size(); ++i) {
        keyed[i].target.rank = static_cast<int>(i) + 1;
        targets.push_back(std::move(keyed[i].target));
    }
    return targets;
}

// ── Serialization ──────────────────────────────────────────────────────────

namespace {

ordered_json warning_json(const Warning& warning) {
    ordered_json doc;
    doc["code"] = warning.code;
    doc["message"] = warning.message;
    if (warning.where.line > 0)
        doc["where"] = {{"file", warning.where.file},
                        {"line", warning.where.line},
                        {"column", warning.where.column}};
    else if (!warning.where.file.empty())
        doc["where"] = {{"file", warning.where.file}};
    return doc;
}

Warning warning_from_json(const nlohmann::json& doc) {
    Warning warning;
    warning.code = doc.value("code", "");
    warning.message = doc.value("message", "");
    if (doc.contains("where")) {
        warning.where.file = doc["where"].value("file", "");
        warning.where.line = doc["where"].value("line", 0);
        warning.where.column = doc["where"].value("column", 0);
    }
    return warning;
}

ordered_json quantum_json(const QuantumAssessment& assessment) {
    ordered_json findings = ordered_json::array();
    for (const QuantumFinding& f : assessment.findings) {
        ordered_json item;
        item["component"] = f.component;
        item["detail"] = f.detail;
        if (f.provenance)
            item["provenance"] = {{"native_directive", f.provenance->native_directive},
                                  {"raw_value", f.provenance->raw_value},
                                  {"source",
                                   {{"file", f.provenance->source.file},
                                    {"line", f.provenance->source.line},
                                    {"column", f.provenance->source.column}}},
                                  {"mapping_rule_id", f.provenance->mapping_rule_id}};
        findings.push_back(std::move(item));
    }
    return ordered_json{{"risk_level", to_string(assessment.risk_level)}, {"findings", findings}};
}

ordered_json analysis_json(const ContextAnalysis& analysis) {
    ordered_json doc;
    ordered_json suites = ordered_json::array();
    for (const CipherClassification& c : analysis.suite_classifications) {
        ordered_json item;
        item["token"] = (c.token.negated ? "!" : "") + c.token.text;
        item["kex_category"] = to_string(c.kex_category);
        item["aead"] = c.aead ? ordered_json(*c.aead) : ordered_json(nullptr);
        ordered_json weak = ordered_json::array();
        for (WeakFlag flag : c.weak_flags) weak.push_back(to_string(flag));
        item["weak_flags"] = weak;
        item["quantum_verdict"] = to_string(c.quantum_verdict);
        item["components"] = {{"kex", c.components.kex},
                              {"auth", c.components.auth},
                              {"cipher", c.components.cipher},
                              {"mode", c.components.mode},
                              {"mac_or_hash", c.components.mac_or_hash}};
        suites.push_back(std::move(item));
    }
    doc["suites"] = suites;
    doc["context_kex"] = to_string(analysis.context_kex);
    doc["quantum"] = quantum_json(analysis.quantum);
    ordered_json curves = ordered_json::array();
    for (const auto& [name, cls] : analysis.curves)
        curves.push_back({{"name", name}, {"class", to_string(cls)}});
    doc["curves"] = curves;
    doc["key_ref"] = analysis.key_ref ? ordered_json(to_string(*analysis.key_ref)) : ordered_json(nullptr);
    doc["cert_origin"] =
        analysis.cert_origin ? ordered_json(to_string(*analysis.cert_origin)) : ordered_json(nullptr);
    doc["cert_chain"] =
        analysis.cert_chain ? ordered_json(to_string(*analysis.cert_chain)) : ordered_json(nullptr);
    ordered_json storage = ordered_json::array();
    for (const auto& [path, kind] : analysis.storage_paths)
        storage.push_back({{"path", path}, {"kind", to_string(kind)}});
    doc["storage_paths"] = storage;
    doc["hostname_class"] = to_string(analysis.hostname_class);
    ordered_json presets = ordered_json::array();
    for (const std::string& preset : analysis.legacy_presets) presets.push_back(preset);
    doc["legacy_presets"] = presets;
    doc["mixed_strength"] = analysis.mixed_strength;
    doc["explicit_ciphers"] = analysis.explicit_ciphers;
    doc["has_dhparam"] = analysis.has_dhparam;
    doc["mtls"] = analysis.mtls;
    doc["cipher_token_count"] = analysis.cipher_token_count;
    return doc;
}

ContextAnalysis analysis_from_json(const nlohmann::json& doc) {
    ContextAnalysis analysis;
    for (const auto& item : doc.value("suites", nlohmann::json::array())) {
        CipherClassification c;
        std::string text = item.value("token", "");
        if (!text.empty() && text[0] == '!') {
            c.token.negated = true;
            text = text.substr(1);
        }
        c.token.text = text;
        c.token.kind = TokenKind::suite;
        const std::string kex = item.value("kex_category", "unknown");
        c.kex_category = kex == "ecdhe_dhe" ? KexCategory::ecdhe_dhe
                         : kex == "rsa_kex" ? KexCategory::rsa_kex
                         : kex == "pqc_hybrid" ? KexCategory::pqc_hybrid
                         : kex == "tls13_suite" ? KexCategory::tls13_suite
                                                : KexCategory::unknown;
        if (item.contains("aead") && !item["aead"].is_null()) c.aead = item["aead"].get<bool>();
        for (const auto& flag : item.value("weak_flags", nlohmann::json::array())) {
            const std::string name = flag.get<std::string>();
            if (name == "RC4") c.weak_flags.insert(WeakFlag::RC4);
            else if (name == "DES") c.weak_flags.insert(WeakFlag::DES);
            else if (name == "3DES") c.weak_flags.insert(WeakFlag::TripleDES);
            else if (name == "EXPORT") c.weak_flags.insert(WeakFlag::EXPORT);
            else if (name == "NULL") c.weak_flags.insert(WeakFlag::NULL_CIPHER);
            else if (name == "MD5") c.weak_flags.insert(WeakFlag::MD5);
        }
        if (item.contains("components")) {
            c.components.kex = item["components"].value("kex", "");
            c.components.auth = item["components"].value("auth", "");
            c.components.cipher = item["components"].value("cipher", "");
            c.components.mode = item["components"].value("mode", "");
            c.components.mac_or_hash = item["components"].value("mac_or_hash", "");
        }
        analysis.suite_classifications.push_back(std::move(c));
    }
    const std::string kex = doc.value("context_kex", "unknown");
    analysis.context_kex = kex == "ecdhe_dhe" ? KexCategory::ecdhe_dhe
                           : kex == "rsa_kex" ? KexCategory::rsa_kex
                           : kex == "pqc_hybrid" ? KexCategory::pqc_hybrid
                                                 : KexCategory::unknown;
    if (doc.contains("quantum")) {
        const std::string risk = doc["quantum"].value("risk_level", "vulnerable_fs");
        analysis.quantum.risk_level = risk == "resistant" ? QuantumRisk::resistant
                                      : risk == "vulnerable_no_fs" ? QuantumRisk::vulnerable_no_fs
                                                                   : QuantumRisk::vulnerable_fs;
        for (const auto& item : doc["quantum"].value("findings", nlohmann::json::array())) {
            QuantumFinding f;
            f.component = item.value("component", "");
            f.detail = item.value("detail", "");
            analysis.quantum.findings.push_back(std::move(f));
        }
    }
    for (const auto& item : doc.value("curves", nlohmann::json::array())) {
        const std::string cls = item.value("class", "unknown");
        analysis.curves.emplace_back(item.value("name", ""),
                                     cls == "classical_named" ? CurveClass::classical_named
                                     : cls == "pqc_hybrid" ? CurveClass::pqc_hybrid
                                     : cls == "auto" ? CurveClass::automatic
                                                     : CurveClass::unknown);
    }
    if (doc.contains("key_ref") && !doc["key_ref"].is_null()) {
        const std::string kind = doc["key_ref"].get<std::string>();
        analysis.key_ref = kind == "pkcs11_uri" ? KeyRefKind::pkcs11_uri
                           : kind == "engine_ref" ? KeyRefKind::engine_ref
                           : kind == "env_var" ? KeyRefKind::env_var
                           : kind == "docker_secret" ? KeyRefKind::docker_secret
                           : kind == "relative" ? KeyRefKind::relative
                                                : KeyRefKind::filesystem;
    }
    if (doc.contains("cert_origin") && !doc["cert_origin"].is_null()) {
        const std::string kind = doc["cert_origin"].get<std::string>();
        analysis.cert_origin = kind == "lets_encrypt_acme" ? CertOrigin::lets_encrypt_acme
                               : kind == "self_signed_indicator" ? CertOrigin::self_signed_indicator
                               : kind == "env_var" ? CertOrigin::env_var
                                                   : CertOrigin::other;
    }
    if (doc.contains("cert_chain") && !doc["cert_chain"].is_null())
        analysis.cert_chain = doc["cert_chain"].get<std::string>() == "fullchain_bundle"
                                  ? CertChainKind::fullchain_bundle
                                  : CertChainKind::leaf_only;
    for (const auto& item : doc.value("storage_paths", nlohmann::json::array())) {
        const std::string kind = item.value("kind", "other_absolute");
        StorageKind storage = kind == "docker_secrets" ? StorageKind::docker_secrets
                              : kind == "letsencrypt" ? StorageKind::letsencrypt
                              : kind == "nginx_dir" ? StorageKind::nginx_dir
                              : kind == "ssl_pki" ? StorageKind::ssl_pki
                              : kind == "opt_srv" ? StorageKind::opt_srv
                              : kind == "env_var" ? StorageKind::env_var
                              : kind == "relative" ? StorageKind::relative
                                                   : StorageKind::other_absolute;
        analysis.storage_paths.emplace_back(item.value("path", ""), storage);
    }
    const std::string host = doc.value("hostname_class", "empty");
    analysis.hostname_class = host == "domain_like" ? HostnameClass::domain_like
                              : host == "localhost" ? HostnameClass::localhost
                              : host == "catch_all" ? HostnameClass::catch_all
                              : host == "env_var" ? HostnameClass::env_var
                              : host == "example_domain" ? HostnameClass::example_domain
                              : host == "wildcard_only" ? HostnameClass::wildcard_only
                              : host == "loopback_ip" ? HostnameClass::loopback_ip
                              : host == "other" ? HostnameClass::other
                                                : HostnameClass::empty;
    for (const auto& item : doc.value("legacy_presets", nlohmann::json::array()))
        analysis.legacy_presets.insert(item.get<std::string>());
    analysis.mixed_strength = doc.value("mixed_strength", false);
    analysis.explicit_ciphers = doc.value("explicit_ciphers", false);
    analysis.has_dhparam = doc.value("has_dhparam", false);
    analysis.mtls = doc.value("mtls", false);
    analysis.cipher_token_count = doc.value("cipher_token_count", 0);
    return analysis;
}

ordered_json intermediate_json(const IntermediateConfig& config) {
    ordered_json doc;
    doc["technology"] = to_string(config.technology);
    doc["context_id"] = config.context_id;
    doc["ordinal"] = config.ordinal;
    doc["label"] = config.context_label;
    doc["tls_enabled"] = config.tls_enabled;
    ordered_json endpoints = ordered_json::array();
    for (const StructuralValue& endpoint : config.endpoints)
        endpoints.push_back({{"native_directive", endpoint.native_directive},
                             {"raw_value", endpoint.raw_value},
                             {"line", endpoint.source.line},
                             {"column", endpoint.source.column},
                             {"depth", endpoint.inheritance_depth}});
    doc["endpoints"] = endpoints;
    if (config.hostname)
        doc["hostname"] = {{"native_directive", config.hostname->native_directive},
                           {"raw_value", config.hostname->raw_value},
                           {"line", config.hostname->source.line},
                           {"column", config.hostname->source.column},
                           {"depth", config.hostname->inheritance_depth}};
    else
        doc["hostname"] = nullptr;
    ordered_json directives = ordered_json::object();
    for (const auto& [name, effective] : config.directives) {
        ordered_json occurrences = ordered_json::array();
        for (const DirectiveOccurrence& occ : effective.occurrences)
            occurrences.push_back({{"raw_value", occ.raw_value},
                                   {"file", occ.source.file},
                                   {"line", occ.source.line},
                                   {"column", occ.source.column},
                                   {"depth", occ.inheritance_depth}});
        directives[name] = occurrences;
    }
    doc["directives"] = directives;
    ordered_json warnings = ordered_json::array();
    for (const Warning& warning : config.warnings) warnings.push_back(warning_json(warning));
    doc["warnings"] = warnings;
    return doc;
}

}  // namespace

ordered_json intermediates_to_json(const Inventory& inventory) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "intermediate";
    ordered_json contexts = ordered_json::array();
    for (const IntermediateConfig& config : inventory.intermediates)
        contexts.push_back(intermediate_json(config));
    doc["contexts"] = contexts;
    return doc;
}

ordered_json inventory_to_json(const Inventory& inventory) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "inventory";
    doc["reference_date"] = to_string(inventory.reference_date);
    doc["confidence_threshold"] = inventory.confidence_threshold;

    int tls_contexts = 0, contexts = 0;
    for (const FileEntry& file : inventory.files) {
        contexts += file.contexts;
        tls_contexts += file.tls_contexts;
    }
    doc["totals"] = {{"files", inventory.files.size()},
                     {"contexts", contexts},
                     {"tls_contexts", tls_contexts},
                     {"records", inventory.records.size()}};

    ordered_json files = ordered_json::array();
    for (const FileEntry& file : inventory.files) {
        ordered_json item;
        item["path"] = file.path;
        item["content_hash"] = file.content_hash;
        item["technology"] = to_string(file.technology);
        item["confidence"] = file.confidence;
        item["parsed"] = file.parsed;
        item["contexts"] = file.contexts;
        item["tls_contexts"] = file.tls_contexts;
        if (file.repo) {
            item["repo"] = {{"owner", file.repo->owner},
                            {"repo", file.repo->repo},
                            {"archived", file.repo->archived_flag},
                            {"last_push", to_string(file.repo->last_push)},
                            {"status", to_string(file.repo->status)},
                            {"sensitivity", file.repo->sensitivity}};
        } else {
            item["repo"] = nullptr;
        }
        files.push_back(std::move(item));
    }
    doc["files"] = files;

    ordered_json records = ordered_json::array();
    for (const ContextRecord& record : inventory.records) {
        ordered_json item;
        item["context_id"] = record.context_id;
        item["file"] = record.file;
        item["ordinal"] = record.ordinal;
        item["repo_status"] =
            record.repo_status ? ordered_json(to_string(*record.repo_status)) : ordered_json(nullptr);
        item["utm"] = utm_to_json(record.utm);
        item["classifications"] = analysis_json(record.analysis);
        records.push_back(std::move(item));
    }
    doc["records"] = records;

    ordered_json warnings = ordered_json::array();
    for (const Warning& warning : inventory.warnings) warnings.push_back(warning_json(warning));
    doc["warnings"] = warnings;
    return doc;
}

Inventory inventory_from_json(const nlohmann::json& doc) {
    Inventory inventory;
    if (auto date = parse_civil_date(doc.value("reference_date", "1970-01-01")))
        inventory.reference_date = *date;
    inventory.confidence_threshold = doc.value("confidence_threshold", 0.5);
    for (const auto& item : doc.value("files", nlohmann::json::array())) {
        FileEntry file;
        file.path = item.value("path", "");
        file.content_hash = item.value("content_hash", "");
        file.technology =
            technology_from_string(item.value("technology", "unknown")).value_or(Technology::unknown);
        file.confidence = item.value("confidence", 0.0);
        file.parsed = item.value("parsed", false);
        file.contexts = item.value("contexts", 0);
        file.tls_contexts = item.value("tls_contexts", 0);
        if (item.contains("repo") && !item["repo"].is_null()) {
            RepoMeta meta;
            meta.owner = item["repo"].value("owner", "");
            meta.repo = item["repo"].value("repo", "");
            meta.archived_flag = item["repo"].value("archived", false);
            if (auto date = parse_civil_date(item["repo"].value("last_push", "")))
                meta.last_push = *date;
            const std::string status = item["repo"].value("status", "active");
            meta.status = status == "archived" ? RepoStatus::archived
                          : status == "dormant" ? RepoStatus::dormant
                                                : RepoStatus::active;
            meta.sensitivity = item["repo"].value("sensitivity", 0.0);
            file.repo = meta;
        }
        inventory.files.push_back(std::move(file));
    }
    for (const auto& item : doc.value("records", nlohmann::json::array())) {
        ContextRecord record;
        record.context_id = item.value("context_id", "");
        record.file = item.value("file", "");
        record.ordinal = item.value("ordinal", 0);
        if (item.contains("repo_status") && !item["repo_status"].is_null()) {
            const std::string status = item["repo_status"].get<std::string>();
            record.repo_status = status == "archived" ? RepoStatus::archived
                                 : status == "dormant" ? RepoStatus::dormant
                                                       : RepoStatus::active;
        }
        record.utm = utm_from_json(item.at("utm"));
        record.analysis = analysis_from_json(item.value("classifications", nlohmann::json::object()));
        inventory.records.push_back(std::move(record));
    }
    for (const auto& item : doc.value("warnings", nlohmann::json::array()))
        inventory.warnings.push_back(warning_from_json(item));
    return inventory;
}

ordered_json assessment_to_json(const AssessmentResult& result, const std::vector<Policy>& policies) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "findings";

    ordered_json policy_list = ordered_json::array();
    for (const Policy& policy : policies)
        policy_list.push_back({{"id", policy.id}, {"name", policy.name}, {"rules", policy.rules.size()}});
    doc["policies"] = policy_list;

    int pass = 0, fail = 0;
    ordered_json reports = ordered_json::array();
    for (const PolicyReport& report : result.reports) {
        (report.pass ? pass : fail) += 1;
        ordered_json item;
        item["context_id"] = report.context_id;
        item["policy_id"] = report.policy_id;
        item["verdict"] = report.pass ? "pass" : "fail";
        ordered_json findings = ordered_json::array();
        for (const PolicyFinding& finding : report.findings) {
            ordered_json f;
            f["rule_id"] = finding.rule_id;
            f["severity"] = to_string(finding.severity);
            f["observed"] = finding.observed;
            if (finding.provenance)
                f["provenance"] = {{"native_directive", finding.provenance->native_directive},
                                   {"raw_value", finding.provenance->raw_value},
                                   {"source",
                                    {{"file", finding.provenance->source.file},
                                     {"line", finding.provenance->source.line},
                                     {"column", finding.provenance->source.column}}},
                                   {"mapping_rule_id", finding.provenance->mapping_rule_id}};
            else
                f["provenance"] = nullptr;
            findings.push_back(std::move(f));
        }
        item["findings"] = findings;
        reports.push_back(std::move(item));
    }
    doc["reports"] = reports;

    ordered_json quantum = ordered_json::array();
    std::map<std::string, int> risk_counts = {
        {"resistant", 0}, {"vulnerable_fs", 0}, {"vulnerable_no_fs", 0}};
    for (const auto& [context_id, assessment] : result.quantum) {
        ++risk_counts[to_string(assessment.risk_level)];
        ordered_json item = quantum_json(assessment);
        item["context_id"] = context_id;
        quantum.push_back(std::move(item));
    }
    doc["quantum"] = quantum;

    doc["summary"] = {{"reports", result.reports.size()},
                      {"pass", pass},
                      {"fail", fail},
                      {"quantum_risk", risk_counts}};
    return doc;
}

ordered_json prioritize_to_json(const std::vector<PrioritizedTarget>& targets) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "prioritize";
    ordered_json list = ordered_json::array();
    for (const PrioritizedTarget& target : targets) {
        ordered_json item;
        item["rank"] = target.rank;
        item["context_id"] = target.context_id;
        item["risk"] = to_string(target.risk);
        item["hsm_backed"] = target.hsm_backed;
        item["port"] = target.port ? ordered_json(*target.port) : ordered_json(nullptr);
        item["sensitivity"] = target.sensitivity;
        item["rationale"] = target.rationale;
        list.push_back(std::move(item));
    }
    doc["targets"] = list;
    return doc;
}

ordered_json diff_to_json(const DiffSummary& diff) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "verify";
    doc["summary"] = {{"improved", diff.improved},
                      {"regressed", diff.regressed},
                      {"unchanged", diff.unchanged},
                      {"added", diff.added},
                      {"removed", diff.removed}};
    ordered_json changes = ordered_json::array();
    for (const ReportDelta& delta : diff.deltas) {
        changes.push_back({{"context_id", delta.context_id},
                           {"policy_id", delta.policy_id},
                           {"change", to_string(delta.change)},
                           {"detail", delta.detail}});
    }
    doc["changes"] = changes;
    return doc;
}

std::string to_stable_string(const ordered_json& doc) { return doc.dump(2) + "\n"; }

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

}  // namespace cryptoscope
