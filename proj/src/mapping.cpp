#include "cryptoscope/mapping.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "cryptoscope/utm.hpp"

namespace cryptoscope {

std::optional<Transform> transform_from_string(const std::string& name) {
    if (name == "identity") return Transform::identity;
    if (name == "split_whitespace") return Transform::split_whitespace;
    if (name == "split_colon") return Transform::split_colon;
    if (name == "protocol_set") return Transform::protocol_set;
    if (name == "boolean") return Transform::boolean;
    if (name == "duration") return Transform::duration;
    if (name == "hsts_header_parse") return Transform::hsts_header_parse;
    if (name == "apache_protocol_algebra") return Transform::apache_protocol_algebra;
    return std::nullopt;
}

std::string to_string(Transform transform) {
    switch (transform) {
        case Transform::identity: return "identity";
        case Transform::split_whitespace: return "split_whitespace";
        case Transform::split_colon: return "split_colon";
        case Transform::protocol_set: return "protocol_set";
        case Transform::boolean: return "boolean";
        case Transform::duration: return "duration";
        case Transform::hsts_header_parse: return "hsts_header_parse";
        case Transform::apache_protocol_algebra: return "apache_protocol_algebra";
    }
    return "identity";
}

const MappingRule* MappingSpec::find_rule(const std::string& native_directive,
                                          const std::vector<std::string>& value_args) const {
    for (const MappingRule& rule : rules) {
        const bool name_match = technology == Technology::apache
                                    ? iequals(rule.native_directive, native_directive)
                                    : rule.native_directive == native_directive;
        if (!name_match) continue;
        if (rule.arg_filter) {
            bool matched = false;
            for (size_t i = 0; i < value_args.size() && i < 3; ++i)
                if (iequals(*rule.arg_filter, value_args[i])) matched = true;
            if (!matched) continue;
        }
        return &rule;
    }
    return nullptr;
}

MappingSpec load_mapping(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read mapping file " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("mapping file " + path.string() + " is not valid JSON");

    MappingSpec spec;
    const std::string tech = doc.value("technology", "");
    auto technology = technology_from_string(tech);
    if (!technology)
        throw ConfigError(path.string() + ": unknown technology '" + tech + "'");
    spec.technology = *technology;
    spec.version = doc.value("version", "1");
    if (doc.contains("endpoint_role") && doc["endpoint_role"].is_string())
        spec.role_constant = doc["endpoint_role"].get<std::string>();
    spec.legacy_protocol_universe = doc.value("legacy_protocol_universe", false);

    if (!doc.contains("rules") || !doc["rules"].is_array())
        throw ConfigError(path.string() + ": missing 'rules' array");

    std::set<std::string> seen_ids;
    for (const auto& item : doc["rules"]) {
        MappingRule rule;
        rule.rule_id = item.value("rule_id", "");
        if (rule.rule_id.empty()) throw ConfigError(path.string() + ": rule without rule_id");
        if (!seen_ids.insert(rule.rule_id).second)
            throw ConfigError(path.string() + ": duplicate rule_id '" + rule.rule_id + "'");
        rule.native_directive = item.value("native_directive", "");
        if (rule.native_directive.empty())
            throw ConfigError(path.string() + ": rule '" + rule.rule_id + "' without native_directive");

        const std::string transform_name = item.value("transform", "");
        auto transform = transform_from_string(transform_name);
        if (!transform)
            throw ConfigError(path.string() + ": rule '" + rule.rule_id + "' has unknown transform '" +
                              transform_name + "'");
        rule.transform = *transform;

        rule.utm_field = item.value("utm_field", "");
        if (!is_utm_field(rule.utm_field)) {
            std::string valid;
            for (const std::string& field : utm_field_paths()) valid += "\n  " + field;
            throw ConfigError(path.string() + ": rule '" + rule.rule_id + "' targets unknown utm_field '" +
                              rule.utm_field + "'; valid fields are:" + valid);
        }
        if (item.contains("arg_filter")) rule.arg_filter = item["arg_filter"].get<std::string>();
        if (item.contains("value_map"))
            for (const auto& [key, value] : item["value_map"].items())
                rule.value_map[to_lower(key)] = value.get<std::string>();
        spec.rules.push_back(std::move(rule));
    }
    return spec;
}

std::map<Technology, MappingSpec> load_mappings_dir(const std::filesystem::path& dir) {
    std::map<Technology, MappingSpec> out;
    for (const char* name : {"nginx", "apache", "springboot"}) {
        const std::filesystem::path file = dir / (std::string(name) + ".json");
        if (!std::filesystem::exists(file))
            throw ConfigError("mappings directory " + dir.string() + " is missing " + name + ".json");
        MappingSpec spec = load_mapping(file);
        out[spec.technology] = std::move(spec);
    }
    return out;
}

}  // namespace cryptoscope
