#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/common.hpp"

namespace cryptoscope {

enum class Transform {
    identity,
    split_whitespace,
    split_colon,
    protocol_set,
    boolean,
    duration,
    hsts_header_parse,
    apache_protocol_algebra
};

std::optional<Transform> transform_from_string(const std::string& name);
std::string to_string(Transform transform);

struct MappingRule {
    std::string rule_id;
    std::string native_directive;
    Transform transform = Transform::identity;
    std::string utm_field;
    /// Applies the rule only when the value's first argument equals this
    /// (add_header / Header / SSLOpenSSLConfCmd discrimination). The
    /// matched argument is stripped before the transform runs.
    std::optional<std::string> arg_filter;
    /// Post-transform rewrite of enum-ish values, matched against the
    /// lowercased first [:\s]-delimited token. A populated map with no
    /// match leaves the field unset and records a finding.
    std::map<std::string, std::string> value_map;
};

/// Declarative normalization table for one technology.
struct MappingSpec {
    Technology technology = Technology::unknown;
    std::string version;
    std::vector<MappingRule> rules;
    /// Optional constant for endpoint.role (the only way role is populated).
    std::optional<std::string> role_constant;
    /// Apache `SSLProtocol all` universe includes SSLv3 only in legacy mode.
    bool legacy_protocol_universe = false;

    /// First rule whose directive name matches (case-insensitive for
    /// apache) and whose arg_filter, if any, equals one of the value's
    /// first three whitespace tokens.
    const MappingRule* find_rule(const std::string& native_directive,
                                 const std::vector<std::string>& value_args) const;
};

/// Loads and validates a mapping file. Rejects duplicate rule ids, unknown
/// transforms, and utm_field values that name no real UTM field.
MappingSpec load_mapping(const std::filesystem::path& path);

/// Loads `<dir>/{nginx,apache,springboot}.json`.
std::map<Technology, MappingSpec> load_mappings_dir(const std::filesystem::path& dir);

}  // namespace cryptoscope
