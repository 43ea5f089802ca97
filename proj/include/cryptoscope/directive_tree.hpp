#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/common.hpp"

namespace cryptoscope {

/// One node of a vendor configuration syntax tree. Leaf directives carry no
/// children; block directives (`http {}`, `<VirtualHost>`) may.
struct DirectiveNode {
    std::string name;
    std::vector<std::string> args;
    std::vector<DirectiveNode> children;
    bool is_block = false;
    SourceLoc source;
};

struct ParseOutcome {
    std::vector<DirectiveNode> tree;
    std::optional<ParseError> error;

    bool ok() const { return !error.has_value(); }
};

/// Structural equality ignoring source locations (used by round-trip tests).
bool same_shape(const DirectiveNode& a, const DirectiveNode& b);
bool same_shape(const std::vector<DirectiveNode>& a, const std::vector<DirectiveNode>& b);

}  // namespace cryptoscope
