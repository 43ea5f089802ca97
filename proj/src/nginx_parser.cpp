#include "cryptoscope/nginx_parser.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cryptoscope {

namespace {

enum class TokType { word, lbrace, rbrace, semicolon, eof };

struct Token {
    TokType type = TokType::eof;
    std::string text;
    int line = 1;
    int column = 1;
    bool quoted = false;
};

// Nginx-style lexer: `#` opens a comment only at a token boundary, quoted
// strings form a single token, `\"`/`\'`/`\\` escapes are unwrapped.
class Lexer {
public:
    Lexer(const std::string& input, const std::string& file) : input_(input), file_(file) {}

    Token next() {
        skip_space_and_comments();
        Token token;
        token.line = line_;
        token.column = column_;
        if (eof()) {
            token.type = TokType::eof;
            return token;
        }
        char c = peek();
        if (c == '{' || c == '}' || c == ';') {
            get();
            token.type = c == '{' ? TokType::lbrace : c == '}' ? TokType::rbrace : TokType::semicolon;
            token.text = c;
            return token;
        }
        if (c == '"' || c == '\'') {
            token.type = TokType::word;
            token.quoted = true;
            token.text = read_quoted(c);
            return token;
        }
        token.type = TokType::word;
        while (!eof()) {
            char w = peek();
            if (w == ' ' || w == '\t' || w == '\r' || w == '\n' || w == ';' || w == '{' || w == '}')
                break;
            token.text += get();
        }
        return token;
    }

    std::optional<ParseError> error;
    const std::string& file() const { return file_; }

private:
    bool eof() const { return pos_ >= input_.size(); }
    char peek() const { return input_[pos_]; }
    char get() {
        char c = input_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else {
                break;
            }
        }
    }

    std::string read_quoted(char quote) {
        const int start_line = line_, start_col = column_;
        get();  // opening quote
        std::string out;
        while (!eof()) {
            char c = get();
            if (c == '\\' && !eof() && (peek() == quote || peek() == '\\')) {
                out += get();
                continue;
            }
            if (c == quote) return out;
            out += c;
        }
        error = ParseError{{file_, start_line, start_col}, "unterminated quoted string"};
        return out;
    }

    const std::string& input_;
    std::string file_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}  // namespace

ParseOutcome parse_nginx(const CorpusEntry& entry) {
    ParseOutcome outcome;
    if (entry.content.size() > kMaxConfigBytes) {
        outcome.error = ParseError{{entry.path, 0, 0},
                                   "file exceeds size bound of " + std::to_string(kMaxConfigBytes) +
                                       " bytes (" + std::to_string(entry.content.size()) + ")"};
        return outcome;
    }

    Lexer lexer(entry.content, entry.path);
    std::vector<std::vector<DirectiveNode>*> stack;
    std::vector<SourceLoc> open_blocks;
    stack.push_back(&outcome.tree);

    std::optional<DirectiveNode> pending;  // directive whose terminator we have not seen yet

    while (true) {
        Token token = lexer.next();
        if (lexer.error) {
            outcome.error = lexer.error;
            outcome.tree.clear();
            return outcome;
        }
        const SourceLoc here{entry.path, token.line, token.column};

        switch (token.type) {
            case TokType::word:
                if (!pending) {
                    pending = DirectiveNode{};
                    pending->name = token.text;
                    pending->source = here;
                } else {
                    pending->args.push_back(token.text);
                }
                break;

            case TokType::semicolon:
                if (!pending) {
                    outcome.error = ParseError{here, "unexpected ';'"};
                    outcome.tree.clear();
                    return outcome;
                }
                stack.back()->push_back(std::move(*pending));
                pending.reset();
                break;

            case TokType::lbrace: {
                if (!pending) {
                    outcome.error = ParseError{here, "unexpected '{'"};
                    outcome.tree.clear();
                    return outcome;
                }
                pending->is_block = true;
                stack.back()->push_back(std::move(*pending));
                pending.reset();
                stack.push_back(&stack.back()->back().children);
                open_blocks.push_back(here);
                break;
            }

            case TokType::rbrace:
                if (pending) {
                    outcome.error = ParseError{here, "unexpected '}' before ';'"};
                    outcome.tree.clear();
                    return outcome;
                }
                if (open_blocks.empty()) {
                    outcome.error = ParseError{here, "unexpected '}' with no open block"};
                    outcome.tree.clear();
                    return outcome;
                }
                stack.pop_back();
                open_blocks.pop_back();
                break;

            case TokType::eof:
                if (pending) {
                    outcome.error =
                        ParseError{pending->source, "directive '" + pending->name + "' missing ';'"};
                    outcome.tree.clear();
                    return outcome;
                }
                if (!open_blocks.empty()) {
                    outcome.error = ParseError{open_blocks.back(), "unbalanced braces: block opened here is never closed"};
                    outcome.tree.clear();
                    return outcome;
                }
                return outcome;
        }
    }
}

// ── Serialization (round-trip checks) ──────────────────────────────────────

static void quote_arg_if_needed(std::string& out, const std::string& arg) {
    const bool needs_quotes =
        arg.empty() || arg.find_first_of(" \t\r\n;{}#\"'") != std::string::npos;
    if (!needs_quotes) {
        out += arg;
        return;
    }
    out += '"';
    for (char c : arg) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

static void dump_nodes(std::string& out, const std::vector<DirectiveNode>& nodes, int indent) {
    for (const DirectiveNode& node : nodes) {
        out.append(static_cast<size_t>(indent) * 4, ' ');
        out += node.name;
        for (const std::string& arg : node.args) {
            out += ' ';
            quote_arg_if_needed(out, arg);
        }
        if (node.is_block) {
            out += " {\n";
            dump_nodes(out, node.children, indent + 1);
            out.append(static_cast<size_t>(indent) * 4, ' ');
            out += "}\n";
        } else {
            out += ";\n";
        }
    }
}

std::string dump_nginx(const std::vector<DirectiveNode>& tree) {
    std::string out;
    dump_nodes(out, tree, 0);
    return out;
}

bool same_shape(const DirectiveNode& a, const DirectiveNode& b) {
    return a.name == b.name && a.args == b.args && a.is_block == b.is_block &&
           same_shape(a.children, b.children);
}

bool same_shape(const std::vector<DirectiveNode>& a, const std::vector<DirectiveNode>& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](const DirectiveNode& x, const DirectiveNode& y) { return same_shape(x, y); });
}

// ── Context resolution ─────────────────────────────────────────────────────

namespace {

struct IncludeExpander {
    const ResolveOptions& options;
    std::vector<Warning>& warnings;
    std::set<std::string> in_flight;

    // Replaces include leaves with the parsed content of their target when
    // the target resolves inside the corpus; unresolved targets (globs,
    // absent files) become warnings.
    void expand(std::vector<DirectiveNode>& nodes, const std::string& current_file) {
        std::vector<DirectiveNode> out;
        for (DirectiveNode& node : nodes) {
            if (!node.is_block && node.name == "include" && node.args.size() == 1) {
                std::optional<std::vector<DirectiveNode>> included =
                    load_target(node.args[0], current_file, node.source);
                if (included) {
                    for (DirectiveNode& child : *included) out.push_back(std::move(child));
                    continue;
                }
            }
            if (node.is_block) expand(node.children, current_file);
            out.push_back(std::move(node));
        }
        nodes = std::move(out);
    }

    std::optional<std::vector<DirectiveNode>> load_target(const std::string& target,
                                                          const std::string& current_file,
                                                          const SourceLoc& loc) {
        if (target.find('*') != std::string::npos || target.find('?') != std::string::npos) {
            warnings.push_back({"unresolved-include", "glob include '" + target + "' not expanded", loc});
            return std::nullopt;
        }
        if (!options.loader) {
            warnings.push_back({"unresolved-include", "include '" + target + "' not resolved", loc});
            return std::nullopt;
        }
        // Candidate paths, all corpus-root-relative: sibling of the
        // including file, then straight from the root.
        std::vector<std::string> candidates;
        const auto slash = current_file.find_last_of('/');
        if (target.front() != '/') {
            if (slash != std::string::npos) candidates.push_back(current_file.substr(0, slash + 1) + target);
            candidates.push_back(target);
        } else {
            candidates.push_back(target.substr(1));
        }
        for (std::string& candidate : candidates) {
            candidate = lexically_normal(candidate);
            if (candidate.empty() || candidate.starts_with("..")) continue;
            if (in_flight.contains(candidate)) {
                warnings.push_back({"include-cycle", "include cycle through '" + candidate + "'", loc});
                return std::nullopt;
            }
            std::optional<std::string> content = options.loader(candidate);
            if (!content) continue;
            CorpusEntry entry;
            entry.path = candidate;
            entry.content = std::move(*content);
            ParseOutcome sub = parse_nginx(entry);
            if (!sub.ok()) {
                warnings.push_back({"include-parse-error",
                                    "included file '" + candidate + "': " + sub.error->message, loc});
                return std::nullopt;
            }
            in_flight.insert(candidate);
            expand(sub.tree, candidate);
            in_flight.erase(candidate);
            return std::move(sub.tree);
        }
        warnings.push_back({"unresolved-include", "include '" + target + "' not found under corpus root", loc});
        return std::nullopt;
    }

    static std::string lexically_normal(const std::string& path) {
        return std::filesystem::path(path).lexically_normal().generic_string();
    }
};

using ScopeChain = std::vector<const std::vector<DirectiveNode>*>;  // innermost first

// Effective occurrences of `name` for a server context: nearest scope wins;
// same-scope duplicates of non-additive directives shadow (last wins).
struct ScopeLookup {
    std::vector<DirectiveOccurrence> occurrences;
    int depth = -1;
    std::vector<SourceLoc> shadowed;
};

ScopeLookup lookup_directive(const ScopeChain& scopes, const std::string& name, bool additive) {
    ScopeLookup result;
    for (size_t depth = 0; depth < scopes.size(); ++depth) {
        std::vector<DirectiveOccurrence> found;
        for (const DirectiveNode& node : *scopes[depth]) {
            if (node.is_block || node.name != name) continue;
            found.push_back({join(node.args, " "), node.source, static_cast<int>(depth)});
        }
        if (found.empty()) continue;
        result.depth = static_cast<int>(depth);
        if (additive || found.size() == 1) {
            result.occurrences = std::move(found);
        } else {
            for (size_t i = 0; i + 1 < found.size(); ++i) result.shadowed.push_back(found[i].source);
            result.occurrences = {found.back()};
        }
        return result;
    }
    return result;
}

void collect_servers(const std::vector<DirectiveNode>& nodes, ScopeChain enclosing,
                     std::vector<std::pair<const DirectiveNode*, ScopeChain>>& servers) {
    for (const DirectiveNode& node : nodes) {
        if (!node.is_block) continue;
        if (node.name == "server") {
            ScopeChain chain;
            chain.push_back(&node.children);
            chain.insert(chain.end(), enclosing.begin(), enclosing.end());
            servers.emplace_back(&node, chain);
        } else if (node.name == "http") {
            ScopeChain inner;
            inner.push_back(&node.children);
            inner.insert(inner.end(), enclosing.begin(), enclosing.end());
            collect_servers(node.children, inner, servers);
        }
        // stream{} and other block contexts are out of scope.
    }
}

}  // namespace

std::vector<IntermediateConfig> resolve_nginx_contexts(const std::vector<DirectiveNode>& tree,
                                                       const std::string& path,
                                                       const ResolveOptions& options) {
    std::vector<Warning> include_warnings;
    std::vector<DirectiveNode> resolved = tree;
    IncludeExpander expander{options, include_warnings, {}};
    expander.in_flight.insert(std::filesystem::path(path).lexically_normal().generic_string());
    expander.expand(resolved, path);

    ScopeChain global;
    global.push_back(&resolved);
    std::vector<std::pair<const DirectiveNode*, ScopeChain>> servers;
    collect_servers(resolved, global, servers);

    std::vector<IntermediateConfig> contexts;
    for (size_t index = 0; index < servers.size(); ++index) {
        const auto& [server, chain] = servers[index];
        IntermediateConfig config;
        config.technology = Technology::nginx;
        config.source_file = path;
        config.ordinal = static_cast<int>(index);
        config.context_label = "server";
        config.context_id = path + "#" + std::to_string(index) + ":server";
        if (index == 0) config.warnings = include_warnings;

        // Enclosing scopes only (chain[0] is the server block itself).
        // listen is not inherited: it defines the context's own endpoints.
        for (const DirectiveNode& node : *chain[0]) {
            if (node.is_block || node.name != "listen") continue;
            config.endpoints.push_back({"listen", join(node.args, " "), node.source, 0});
        }

        ScopeLookup name_lookup = lookup_directive(chain, "server_name", false);
        if (!name_lookup.occurrences.empty()) {
            const DirectiveOccurrence& occ = name_lookup.occurrences.back();
            config.hostname = StructuralValue{"server_name", occ.raw_value, occ.source, occ.inheritance_depth};
        }

        bool listen_ssl = false;
        for (const StructuralValue& endpoint : config.endpoints) {
            auto args = split_ws(endpoint.raw_value);
            if (std::find(args.begin(), args.end(), "ssl") != args.end()) listen_ssl = true;
        }
        ScopeLookup legacy_ssl = lookup_directive(chain, "ssl", false);
        const bool legacy_on = !legacy_ssl.occurrences.empty() &&
                               to_lower(legacy_ssl.occurrences.back().raw_value) == "on";
        config.tls_enabled = listen_ssl || legacy_on;

        for (const std::string& name : allowlist_names(Technology::nginx)) {
            ScopeLookup lookup = lookup_directive(chain, name, is_additive_directive(Technology::nginx, name));
            if (lookup.occurrences.empty()) continue;
            if (name == "add_header") {
                // Only the HSTS header is TLS posture; other headers are not
                // allowlist material.
                std::erase_if(lookup.occurrences, [](const DirectiveOccurrence& occ) {
                    auto args = split_ws(occ.raw_value);
                    return args.empty() || !iequals(args[0], "Strict-Transport-Security");
                });
                if (lookup.occurrences.empty()) continue;
            }
            for (const SourceLoc& loc : lookup.shadowed)
                config.warnings.push_back(
                    {"shadowed-directive", "duplicate '" + name + "' in one scope; last occurrence wins", loc});
            config.directives[name] = EffectiveDirective{std::move(lookup.occurrences)};
        }
        contexts.push_back(std::move(config));
    }
    return contexts;
}

}  // namespace cryptoscope
