#pragma once

#include <string>
#include <vector>

#include "cryptoscope/corpus.hpp"
#include "cryptoscope/directive_tree.hpp"
#include "cryptoscope/intermediate.hpp"

namespace cryptoscope {

/// Parses Apache httpd syntax: one directive per (continued) line,
/// `<Container arg>` ... `</Container>` blocks, names matched
/// case-insensitively but stored as written.
ParseOutcome parse_apache(const CorpusEntry& entry);

/// One IntermediateConfig per <VirtualHost>. Global directives are
/// inherited unless overridden inside the vhost; tls_enabled iff the
/// effective SSLEngine is on. SSLProtocol add/remove syntax is preserved
/// raw.
std::vector<IntermediateConfig> resolve_apache_contexts(const std::vector<DirectiveNode>& tree,
                                                        const std::string& path);

std::string dump_apache(const std::vector<DirectiveNode>& tree);

}  // namespace cryptoscope
