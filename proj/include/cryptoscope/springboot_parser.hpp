#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/corpus.hpp"
#include "cryptoscope/intermediate.hpp"

namespace cryptoscope {

/// One profile document from an application config file: the flattened
/// dotted keys of a single YAML document, or the whole properties file.
struct ProfileDocument {
    /// Profiles this document activates for (from `spring.profiles` or
    /// `spring.config.activate.on-profile`); empty = always applied.
    std::vector<std::string> profiles;
    std::map<std::string, DirectiveOccurrence> keys;
    int index = 0;
};

struct SpringParseOutcome {
    std::vector<ProfileDocument> documents;
    std::optional<ParseError> error;

    bool ok() const { return !error.has_value(); }
};

/// YAML files split on `---` into one ProfileDocument each; properties
/// files yield a single document. Values are kept as raw strings; YAML
/// lists are canonicalized to comma-joined strings.
SpringParseOutcome parse_springboot(const CorpusEntry& entry);

/// Overlays the always-applied documents, then each active profile's
/// documents in activation order; the later overlay wins per key.
/// inheritance_depth 0 = supplied by the last overlay. A named profile
/// with no matching document yields a warning.
IntermediateConfig merge_profiles(const std::vector<ProfileDocument>& documents,
                                  const std::vector<std::string>& active_profiles,
                                  const std::string& path);

/// Active profiles declared by the configuration itself
/// (`spring.profiles.active` in an always-applied document).
std::vector<std::string> declared_active_profiles(const std::vector<ProfileDocument>& documents);

}  // namespace cryptoscope
