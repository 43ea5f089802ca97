#include "cryptoscope/springboot_parser.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <sstream>

#include "cryptoscope/nginx_parser.hpp"  // kMaxConfigBytes

namespace cryptoscope {

namespace {

bool is_properties_file(const std::string& path) {
    return path.ends_with(".properties");
}

// ── .properties ────────────────────────────────────────────────────────────

SpringParseOutcome parse_properties(const CorpusEntry& entry) {
    SpringParseOutcome outcome;
    ProfileDocument doc;

    std::istringstream stream(entry.content);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const int first_line = line_no;
        // java.util.Properties line continuation
        while (!raw.empty() && raw.back() == '\\') {
            raw.pop_back();
            std::string next;
            if (!std::getline(stream, next)) break;
            ++line_no;
            if (!next.empty() && next.back() == '\r') next.pop_back();
            raw += trim(next);
        }
        const size_t indent = raw.find_first_not_of(" \t");
        if (indent == std::string::npos) continue;
        if (raw[indent] == '#' || raw[indent] == '!') continue;

        const size_t sep = raw.find_first_of("=:", indent);
        if (sep == std::string::npos) {
            outcome.error = ParseError{{entry.path, first_line, static_cast<int>(indent) + 1},
                                       "property line has no '=' or ':' separator"};
            outcome.documents.clear();
            return outcome;
        }
        const std::string key = trim(raw.substr(indent, sep - indent));
        if (key.empty()) {
            outcome.error = ParseError{{entry.path, first_line, static_cast<int>(indent) + 1},
                                       "property line has an empty key"};
            outcome.documents.clear();
            return outcome;
        }
        const std::string value = trim(raw.substr(sep + 1));
        doc.keys[key] = {value, {entry.path, first_line, static_cast<int>(indent) + 1}, 0};
    }
    outcome.documents.push_back(std::move(doc));
    return outcome;
}

// ── YAML ───────────────────────────────────────────────────────────────────

std::string scalar_or_join(const YAML::Node& node) {
    if (node.IsScalar()) return node.Scalar();
    if (node.IsSequence()) {
        std::vector<std::string> parts;
        for (const auto& item : node)
            parts.push_back(item.IsScalar() ? item.Scalar() : "");
        return join(parts, ",");
    }
    if (node.IsNull()) return "";
    return "";
}

void flatten(const YAML::Node& node, const std::string& prefix, const std::string& file,
             std::map<std::string, DirectiveOccurrence>& out) {
    if (!node.IsMap()) return;
    for (const auto& pair : node) {
        if (!pair.first.IsScalar()) continue;
        const std::string key = prefix.empty() ? pair.first.Scalar() : prefix + "." + pair.first.Scalar();
        const YAML::Mark mark = pair.first.Mark();
        const SourceLoc loc{file, mark.line + 1, mark.column + 1};
        if (pair.second.IsMap()) {
            flatten(pair.second, key, file, out);
        } else {
            out[key] = {scalar_or_join(pair.second), loc, 0};
        }
    }
}

SpringParseOutcome parse_yaml(const CorpusEntry& entry) {
    SpringParseOutcome outcome;
    std::vector<YAML::Node> roots;
    try {
        roots = YAML::LoadAll(entry.content);
    } catch (const YAML::ParserException& ex) {
        outcome.error = ParseError{{entry.path, ex.mark.line + 1, ex.mark.column + 1}, ex.msg};
        return outcome;
    } catch (const YAML::Exception& ex) {
        outcome.error = ParseError{{entry.path, 1, 1}, ex.what()};
        return outcome;
    }

    int index = 0;
    for (const YAML::Node& root : roots) {
        if (root.IsNull() || !root.IsDefined()) continue;
        ProfileDocument doc;
        doc.index = index++;
        flatten(root, "", entry.path, doc.keys);
        for (const char* activation_key : {"spring.profiles", "spring.config.activate.on-profile"}) {
            auto it = doc.keys.find(activation_key);
            if (it != doc.keys.end()) {
                doc.profiles = split_on(it->second.raw_value, ", ");
                break;
            }
        }
        outcome.documents.push_back(std::move(doc));
    }
    if (outcome.documents.empty()) outcome.documents.push_back(ProfileDocument{});
    return outcome;
}

}  // namespace

SpringParseOutcome parse_springboot(const CorpusEntry& entry) {
    if (entry.content.size() > kMaxConfigBytes) {
        SpringParseOutcome outcome;
        outcome.error = ParseError{{entry.path, 0, 0},
                                   "file exceeds size bound of " + std::to_string(kMaxConfigBytes) +
                                       " bytes (" + std::to_string(entry.content.size()) + ")"};
        return outcome;
    }
    return is_properties_file(entry.path) ? parse_properties(entry) : parse_yaml(entry);
}

std::vector<std::string> declared_active_profiles(const std::vector<ProfileDocument>& documents) {
    for (const ProfileDocument& doc : documents) {
        if (!doc.profiles.empty()) continue;  // only always-applied documents may activate
        auto it = doc.keys.find("spring.profiles.active");
        if (it != doc.keys.end()) return split_on(it->second.raw_value, ", ");
    }
    return {};
}

IntermediateConfig merge_profiles(const std::vector<ProfileDocument>& documents,
                                  const std::vector<std::string>& active_profiles,
                                  const std::string& path) {
    IntermediateConfig config;
    config.technology = Technology::springboot;
    config.source_file = path;
    config.ordinal = 0;
    config.context_label = "application";
    config.context_id = path + "#0:application";

    // Overlay order: always-applied documents in file order, then each
    // active profile's documents in activation order.
    std::vector<const ProfileDocument*> layers;
    for (const ProfileDocument& doc : documents)
        if (doc.profiles.empty()) layers.push_back(&doc);
    for (const std::string& profile : active_profiles) {
        bool found = false;
        for (const ProfileDocument& doc : documents) {
            if (std::find(doc.profiles.begin(), doc.profiles.end(), profile) != doc.profiles.end()) {
                layers.push_back(&doc);
                found = true;
            }
        }
        if (!found)
            config.warnings.push_back(
                {"missing-profile", "active profile '" + profile + "' has no matching document", {path, 0, 0}});
    }

    struct Layered {
        DirectiveOccurrence occurrence;
        size_t layer = 0;
    };
    std::map<std::string, Layered> effective;
    for (size_t layer = 0; layer < layers.size(); ++layer)
        for (const auto& [key, occurrence] : layers[layer]->keys)
            effective[key] = {occurrence, layer};

    const size_t last_layer = layers.empty() ? 0 : layers.size() - 1;
    auto depth_of = [&](size_t layer) { return static_cast<int>(last_layer - layer); };

    auto find_effective = [&](const std::string& key) -> const Layered* {
        auto it = effective.find(key);
        return it == effective.end() ? nullptr : &it->second;
    };

    const Layered* enabled = find_effective("server.ssl.enabled");
    bool any_ssl_key = false;
    for (const auto& [key, value] : effective)
        if (key.starts_with("server.ssl.") && key != "server.ssl.enabled") any_ssl_key = true;
    if (enabled) {
        const std::string lowered = to_lower(trim(enabled->occurrence.raw_value));
        config.tls_enabled = lowered == "true" || lowered == "on" || lowered == "yes" || lowered == "1";
    } else {
        config.tls_enabled = any_ssl_key;
    }

    if (const Layered* port = find_effective("server.port")) {
        config.endpoints.push_back({"server.port", port->occurrence.raw_value, port->occurrence.source,
                                    depth_of(port->layer)});
    }
    if (const Layered* address = find_effective("server.address")) {
        config.hostname = StructuralValue{"server.address", address->occurrence.raw_value,
                                          address->occurrence.source, depth_of(address->layer)};
    }

    for (const std::string& key : allowlist_names(Technology::springboot)) {
        const Layered* layered = find_effective(key);
        if (!layered) continue;
        DirectiveOccurrence occurrence = layered->occurrence;
        occurrence.inheritance_depth = depth_of(layered->layer);
        config.directives[key] = EffectiveDirective{{std::move(occurrence)}};
    }
    return config;
}

}  // namespace cryptoscope
