#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/common.hpp"

namespace cryptoscope {

/// One effective occurrence of a directive after inheritance resolution.
/// depth 0 = declared in the context itself, k = inherited from the k-th
/// enclosing scope (or, for Spring Boot, from the k-th overlay counting
/// back from the last one applied).
struct DirectiveOccurrence {
    std::string raw_value;
    SourceLoc source;
    int inheritance_depth = 0;
};

/// All effective occurrences of one directive in one context. Most
/// directives resolve to exactly one occurrence; additive directives
/// (listen, add_header, Header) may keep several from the winning scope.
struct EffectiveDirective {
    std::vector<DirectiveOccurrence> occurrences;

    const DirectiveOccurrence& last() const { return occurrences.back(); }
};

/// Context identity material kept outside the allowlisted property map:
/// listen endpoints, virtual-host addresses, server names.
struct StructuralValue {
    std::string native_directive;
    std::string raw_value;
    SourceLoc source;
    int inheritance_depth = 0;
};

/// Vendor-shaped extraction result for one TLS context. Keys of
/// `directives` are native directive names restricted to the property
/// allowlist (see allowlist.cpp for the ten categories per technology).
struct IntermediateConfig {
    Technology technology = Technology::unknown;
    std::string context_id;
    std::string source_file;
    int ordinal = 0;
    std::string context_label;
    bool tls_enabled = false;
    std::map<std::string, EffectiveDirective> directives;
    std::vector<StructuralValue> endpoints;
    std::optional<StructuralValue> hostname;
    std::vector<Warning> warnings;
};

// ── Property allowlist ─────────────────────────────────────────────────────

/// True when `directive` belongs to the technology's ten-category TLS
/// allowlist. Matching is exact for nginx/springboot and case-insensitive
/// for apache; for apache the canonical spelling is returned.
bool allowlisted(Technology tech, const std::string& directive, std::string* canonical = nullptr);

/// Directives whose same-scope repetitions are all effective rather than
/// shadowing each other.
bool is_additive_directive(Technology tech, const std::string& directive);

const std::vector<std::string>& allowlist_names(Technology tech);

}  // namespace cryptoscope
