#include "cryptoscope.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "cryptoscope/pipeline.hpp"

using namespace cryptoscope;

struct cs_engine {
    RunOptions options;
    std::vector<Policy> policies;
    std::string last_error;
};

struct cs_inventory {
    Inventory inventory;
};

namespace {

char* duplicate(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

cs_status capture_error(cs_engine* engine, const std::exception& ex, cs_status code) {
    if (engine) engine->last_error = ex.what();
    return code;
}

}  // namespace

extern "C" {

unsigned int cs_abi_version(void) { return 1; }

cs_engine* cs_engine_new(void) {
    try {
        return new cs_engine();
    } catch (...) {
        return nullptr;
    }
}

void cs_engine_free(cs_engine* engine) { delete engine; }

const char* cs_engine_last_error(const cs_engine* engine) {
    return engine ? engine->last_error.c_str() : "";
}

cs_status cs_engine_load_mappings(cs_engine* engine, const char* mappings_dir) {
    if (!engine || !mappings_dir) return CS_ERR_INVALID_ARGUMENT;
    try {
        engine->options.mappings = load_mappings_dir(mappings_dir);
        return CS_OK;
    } catch (const ConfigError& ex) {
        return capture_error(engine, ex, CS_ERR_CONFIG);
    } catch (const std::exception& ex) {
        return capture_error(engine, ex, CS_ERR_INTERNAL);
    }
}

cs_status cs_engine_load_policy(cs_engine* engine, const char* policy_path) {
    if (!engine || !policy_path) return CS_ERR_INVALID_ARGUMENT;
    try {
        engine->policies.push_back(load_policy(policy_path));
        return CS_OK;
    } catch (const ConfigError& ex) {
        return capture_error(engine, ex, CS_ERR_CONFIG);
    } catch (const std::exception& ex) {
        return capture_error(engine, ex, CS_ERR_INTERNAL);
    }
}

cs_status cs_engine_set_option(cs_engine* engine, const char* key, const char* value) {
    if (!engine || !key || !value) return CS_ERR_INVALID_ARGUMENT;
    const std::string name = key;
    const std::string text = value;
    try {
        if (name == "reference-date") {
            auto date = parse_civil_date(text);
            if (!date) {
                engine->last_error = "bad reference-date '" + text + "' (expected YYYY-MM-DD)";
                return CS_ERR_INVALID_ARGUMENT;
            }
            engine->options.reference_date = *date;
        } else if (name == "confidence-threshold") {
            const double threshold = std::stod(text);
            if (threshold < 0.0 || threshold > 1.0) {
                engine->last_error = "confidence-threshold must be in [0, 1]";
                return CS_ERR_INVALID_ARGUMENT;
            }
            engine->options.confidence_threshold = threshold;
        } else if (name == "jobs") {
            engine->options.jobs = std::max(1, std::stoi(text));
        } else {
            engine->last_error = "unknown option '" + name + "'";
            return CS_ERR_INVALID_ARGUMENT;
        }
        return CS_OK;
    } catch (const std::exception& ex) {
        return capture_error(engine, ex, CS_ERR_INVALID_ARGUMENT);
    }
}

cs_status cs_engine_discover(cs_engine* engine, const char* root, const char* manifest_path,
                             cs_inventory** out_inventory) {
    if (!engine || !root || !out_inventory) return CS_ERR_INVALID_ARGUMENT;
    *out_inventory = nullptr;
    try {
        RunOptions options = engine->options;
        options.root = root;
        if (manifest_path && *manifest_path) options.manifest = std::filesystem::path(manifest_path);
        Inventory inventory = discover(options);
        if (inventory.empty()) {
            engine->last_error = "0 candidate files under " + std::string(root);
            return CS_ERR_EMPTY;
        }
        auto* handle = new cs_inventory{std::move(inventory)};
        *out_inventory = handle;
        return CS_OK;
    } catch (const ConfigError& ex) {
        return capture_error(engine, ex, CS_ERR_CONFIG);
    } catch (const std::exception& ex) {
        return capture_error(engine, ex, CS_ERR_INTERNAL);
    }
}

cs_status cs_inventory_read_json(cs_engine* engine, const char* json_text,
                                 cs_inventory** out_inventory) {
    if (!engine || !json_text || !out_inventory) return CS_ERR_INVALID_ARGUMENT;
    *out_inventory = nullptr;
    try {
        nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
        if (doc.is_discarded()) {
            engine->last_error = "inventory JSON is malformed";
            return CS_ERR_CONFIG;
        }
        auto* handle = new cs_inventory{inventory_from_json(doc)};
        *out_inventory = handle;
        return CS_OK;
    } catch (const std::exception& ex) {
        return capture_error(engine, ex, CS_ERR_CONFIG);
    }
}

void cs_inventory_free(cs_inventory* inventory) { delete inventory; }

char* cs_inventory_to_json(const cs_inventory* inventory) {
    if (!inventory) return nullptr;
    return duplicate(to_stable_string(inventory_to_json(inventory->inventory)));
}

char* cs_inventory_utm_json(const cs_inventory* inventory) {
    if (!inventory) return nullptr;
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "utm";
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const ContextRecord& record : inventory->inventory.records) {
        nlohmann::ordered_json item;
        item["context_id"] = record.context_id;
        item["utm"] = utm_to_json(record.utm);
        list.push_back(std::move(item));
    }
    doc["contexts"] = list;
    return duplicate(to_stable_string(doc));
}

char* cs_inventory_intermediate_json(const cs_inventory* inventory) {
    if (!inventory) return nullptr;
    return duplicate(to_stable_string(intermediates_to_json(inventory->inventory)));
}

char* cs_inventory_warnings_text(const cs_inventory* inventory) {
    if (!inventory) return nullptr;
    std::string out;
    for (const Warning& warning : inventory->inventory.warnings) {
        out += warning.code + ": " + warning.message;
        if (warning.where.line > 0)
            out += " (" + warning.where.file + ":" + std::to_string(warning.where.line) + ")";
        out += "\n";
    }
    return duplicate(out);
}

char* cs_engine_assess(cs_engine* engine, const cs_inventory* inventory) {
    if (!engine || !inventory) return nullptr;
    try {
        AssessmentResult result = assess(inventory->inventory, engine->policies);
        return duplicate(to_stable_string(assessment_to_json(result, engine->policies)));
    } catch (const std::exception& ex) {
        engine->last_error = ex.what();
        return nullptr;
    }
}

char* cs_engine_prioritize(cs_engine* engine, const cs_inventory* inventory) {
    if (!engine || !inventory) return nullptr;
    try {
        return duplicate(to_stable_string(prioritize_to_json(prioritize(inventory->inventory))));
    } catch (const std::exception& ex) {
        engine->last_error = ex.what();
        return nullptr;
    }
}

char* cs_engine_metrics(cs_engine* engine, const cs_inventory* inventory) {
    if (!engine || !inventory) return nullptr;
    try {
        CorpusMetrics metrics = compute_metrics(inventory->inventory.records,
                                                inventory->inventory.file_summaries());
        return duplicate(to_stable_string(metrics_to_json(metrics)));
    } catch (const std::exception& ex) {
        engine->last_error = ex.what();
        return nullptr;
    }
}

char* cs_engine_metrics_text(cs_engine* engine, const cs_inventory* inventory) {
    if (!engine || !inventory) return nullptr;
    try {
        CorpusMetrics metrics = compute_metrics(inventory->inventory.records,
                                                inventory->inventory.file_summaries());
        return duplicate(metrics_to_text(metrics));
    } catch (const std::exception& ex) {
        engine->last_error = ex.what();
        return nullptr;
    }
}

char* cs_engine_metrics_csv(cs_engine* engine, const cs_inventory* inventory) {
    if (!engine || !inventory) return nullptr;
    try {
        CorpusMetrics metrics = compute_metrics(inventory->inventory.records,
                                                inventory->inventory.file_summaries());
        nlohmann::ordered_json doc = nlohmann::ordered_json::object();
        for (const auto& [name, csv] : metrics_to_csv(metrics)) doc[name] = csv;
        return duplicate(to_stable_string(doc));
    } catch (const std::exception& ex) {
        engine->last_error = ex.what();
        return nullptr;
    }
}

char* cs_engine_verify(cs_engine* engine, const cs_inventory* baseline,
                       const cs_inventory* current) {
    if (!engine || !baseline || !current) return nullptr;
    try {
        AssessmentResult before = assess(baseline->inventory, engine->policies);
        AssessmentResult after = assess(current->inventory, engine->policies);
        DiffSummary diff = diff_reports(before.reports, after.reports);
        nlohmann::ordered_json doc = diff_to_json(diff);
        doc["current_fail_count"] = after.fail_count;
        return duplicate(to_stable_string(doc));
    } catch (const std::exception& ex) {
        engine->last_error = ex.what();
        return nullptr;
    }
}

void cs_string_free(char* text) { std::free(text); }

}  // extern "C"
