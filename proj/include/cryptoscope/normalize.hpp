#pragma once

#include <vector>

#include "cryptoscope/intermediate.hpp"
#include "cryptoscope/mapping.hpp"
#include "cryptoscope/utm.hpp"

namespace cryptoscope {

struct NormalizedContext {
    /// One model per TLS listen endpoint of the context (they share every
    /// non-endpoint field); exactly one when the context declares zero or
    /// one endpoint.
    std::vector<UnifiedTlsModel> models;
    std::vector<Warning> findings;
};

/// Applies the technology's mapping rules to an IntermediateConfig.
/// Transform failures leave the field unset and record a finding; they are
/// never fatal. Allowlisted directives without a matching rule become
/// unmapped-directive findings.
NormalizedContext normalize(const IntermediateConfig& config, const MappingSpec& spec);

}  // namespace cryptoscope
