#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cryptoscope/corpus.hpp"
#include "cryptoscope/directive_tree.hpp"
#include "cryptoscope/intermediate.hpp"

namespace cryptoscope {

inline constexpr size_t kMaxConfigBytes = 4 * 1024 * 1024;

/// Loads the content of a referenced include target, or nullopt when the
/// path cannot be served from the corpus. `path` is corpus-root-relative.
using IncludeLoader = std::function<std::optional<std::string>(const std::string& path)>;

struct ResolveOptions {
    /// Resolves `include` directives. When absent every include is recorded
    /// as an unresolved-include warning.
    IncludeLoader loader;
};

/// Parses nginx block-directive syntax into a tree. Comments are dropped,
/// `include` directives stay as leaves, every token is consumed or a parse
/// error with location is returned. Files over kMaxConfigBytes are refused.
ParseOutcome parse_nginx(const CorpusEntry& entry);

/// One IntermediateConfig per `server` block, inheritance resolved
/// global -> http -> server with the nearest scope winning, allowlist
/// filtering applied. tls_enabled when a listen argument carries the `ssl`
/// token or the legacy `ssl on;` directive is effective.
std::vector<IntermediateConfig> resolve_nginx_contexts(const std::vector<DirectiveNode>& tree,
                                                       const std::string& path,
                                                       const ResolveOptions& options = {});

/// Canonical re-serialization of a parsed tree (round-trip checks).
std::string dump_nginx(const std::vector<DirectiveNode>& tree);

}  // namespace cryptoscope
