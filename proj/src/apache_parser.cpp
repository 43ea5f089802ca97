#include "cryptoscope/apache_parser.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "cryptoscope/nginx_parser.hpp"  // kMaxConfigBytes

namespace cryptoscope {

namespace {

// Containers that merge transparently into their enclosing scope for TLS
// purposes. Directory/Location/Files narrow to paths, not vhosts, and are
// treated as opaque.
bool transparent_container(const std::string& name) {
    return iequals(name, "IfModule") || iequals(name, "IfDefine") || iequals(name, "IfVersion");
}

std::vector<std::string> split_apache_args(const std::string& text, size_t& name_end) {
    std::vector<std::string> parts;
    std::string current;
    bool in_quote = false;
    char quote = 0;
    bool first_done = false;
    name_end = std::string::npos;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quote) {
            if (c == '\\' && i + 1 < text.size() && (text[i + 1] == quote || text[i + 1] == '\\')) {
                current += text[++i];
            } else if (c == quote) {
                in_quote = false;
            } else {
                current += c;
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            in_quote = true;
            quote = c;
            continue;
        }
        if (c == ' ' || c == '\t') {
            if (!current.empty()) {
                if (!first_done) {
                    first_done = true;
                    name_end = i;
                }
                parts.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        current += c;
    }
    if (!current.empty()) parts.push_back(std::move(current));
    return parts;
}

}  // namespace

ParseOutcome parse_apache(const CorpusEntry& entry) {
    ParseOutcome outcome;
    if (entry.content.size() > kMaxConfigBytes) {
        outcome.error = ParseError{{entry.path, 0, 0},
                                   "file exceeds size bound of " + std::to_string(kMaxConfigBytes) +
                                       " bytes (" + std::to_string(entry.content.size()) + ")"};
        return outcome;
    }

    struct OpenContainer {
        DirectiveNode node;
        SourceLoc opened_at;
    };
    std::vector<OpenContainer> open;
    auto sink = [&]() -> std::vector<DirectiveNode>& {
        return open.empty() ? outcome.tree : open.back().node.children;
    };

    std::istringstream stream(entry.content);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();

        std::string logical = raw_line;
        const int first_line = line_no;
        while (!logical.empty() && logical.back() == '\\') {
            logical.pop_back();
            std::string continuation;
            if (!std::getline(stream, continuation)) break;
            ++line_no;
            if (!continuation.empty() && continuation.back() == '\r') continuation.pop_back();
            logical += continuation;
        }

        const size_t indent = logical.find_first_not_of(" \t");
        if (indent == std::string::npos) continue;
        const std::string body = logical.substr(indent);
        if (body[0] == '#') continue;
        const int column = static_cast<int>(indent) + 1;
        const SourceLoc here{entry.path, first_line, column};

        if (body[0] == '<') {
            const size_t close = body.find('>');
            if (close == std::string::npos) {
                outcome.error = ParseError{here, "container tag missing '>'"};
                outcome.tree.clear();
                return outcome;
            }
            std::string inner = trim(body.substr(1, close - 1));
            if (!inner.empty() && inner[0] == '/') {
                const std::string closing = trim(inner.substr(1));
                if (open.empty()) {
                    outcome.error = ParseError{here, "'</" + closing + ">' with no open container"};
                    outcome.tree.clear();
                    return outcome;
                }
                if (!iequals(open.back().node.name, closing)) {
                    outcome.error = ParseError{
                        here, "'</" + closing + ">' closes '<" + open.back().node.name + ">' opened at line " +
                                  std::to_string(open.back().opened_at.line)};
                    outcome.tree.clear();
                    return outcome;
                }
                OpenContainer done = std::move(open.back());
                open.pop_back();
                sink().push_back(std::move(done.node));
                continue;
            }
            size_t unused;
            auto parts = split_apache_args(inner, unused);
            if (parts.empty()) {
                outcome.error = ParseError{here, "empty container tag"};
                outcome.tree.clear();
                return outcome;
            }
            OpenContainer container;
            container.node.name = parts[0];
            container.node.args.assign(parts.begin() + 1, parts.end());
            container.node.is_block = true;
            container.node.source = {entry.path, first_line, column + 1};  // name starts after '<'
            container.opened_at = here;
            open.push_back(std::move(container));
            continue;
        }

        size_t unused;
        auto parts = split_apache_args(body, unused);
        if (parts.empty()) continue;
        DirectiveNode leaf;
        leaf.name = parts[0];
        leaf.args.assign(parts.begin() + 1, parts.end());
        leaf.source = here;
        sink().push_back(std::move(leaf));
    }

    if (!open.empty()) {
        outcome.error = ParseError{open.back().opened_at,
                                   "'<" + open.back().node.name + ">' container is never closed"};
        outcome.tree.clear();
        return outcome;
    }
    return outcome;
}

std::string dump_apache(const std::vector<DirectiveNode>& tree) {
    std::string out;
    auto emit_arg = [](std::string& buffer, const std::string& arg) {
        if (arg.empty() || arg.find_first_of(" \t\"'") != std::string::npos) {
            buffer += '"';
            for (char c : arg) {
                if (c == '"' || c == '\\') buffer += '\\';
                buffer += c;
            }
            buffer += '"';
        } else {
            buffer += arg;
        }
    };
    std::function<void(const std::vector<DirectiveNode>&, int)> walk =
        [&](const std::vector<DirectiveNode>& nodes, int indent) {
            for (const DirectiveNode& node : nodes) {
                out.append(static_cast<size_t>(indent) * 4, ' ');
                if (node.is_block) {
                    out += '<' + node.name;
                    for (const std::string& arg : node.args) {
                        out += ' ';
                        emit_arg(out, arg);
                    }
                    out += ">\n";
                    walk(node.children, indent + 1);
                    out.append(static_cast<size_t>(indent) * 4, ' ');
                    out += "</" + node.name + ">\n";
                } else {
                    out += node.name;
                    for (const std::string& arg : node.args) {
                        out += ' ';
                        emit_arg(out, arg);
                    }
                    out += '\n';
                }
            }
        };
    walk(tree, 0);
    return out;
}

// ── Context resolution ─────────────────────────────────────────────────────

namespace {

void collect_scope_leaves(const std::vector<DirectiveNode>& nodes,
                          std::vector<const DirectiveNode*>& leaves, bool skip_vhosts) {
    for (const DirectiveNode& node : nodes) {
        if (!node.is_block) {
            leaves.push_back(&node);
        } else if (transparent_container(node.name)) {
            collect_scope_leaves(node.children, leaves, skip_vhosts);
        } else if (skip_vhosts && iequals(node.name, "VirtualHost")) {
            continue;  // handled as its own context
        }
    }
}

void collect_vhosts(const std::vector<DirectiveNode>& nodes,
                    std::vector<const DirectiveNode*>& vhosts) {
    for (const DirectiveNode& node : nodes) {
        if (!node.is_block) continue;
        if (iequals(node.name, "VirtualHost"))
            vhosts.push_back(&node);
        else if (transparent_container(node.name))
            collect_vhosts(node.children, vhosts);
    }
}

struct ApacheLookup {
    std::vector<DirectiveOccurrence> occurrences;
    std::vector<SourceLoc> shadowed;
};

ApacheLookup lookup(const std::vector<const DirectiveNode*>& vhost_leaves,
                    const std::vector<const DirectiveNode*>& global_leaves,
                    const std::string& canonical, bool additive) {
    ApacheLookup result;
    const std::vector<const DirectiveNode*>* scopes[2] = {&vhost_leaves, &global_leaves};
    for (int depth = 0; depth < 2; ++depth) {
        std::vector<DirectiveOccurrence> found;
        for (const DirectiveNode* node : *scopes[depth]) {
            if (!iequals(node->name, canonical)) continue;
            found.push_back({join(node->args, " "), node->source, depth});
        }
        if (found.empty()) continue;
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

}  // namespace

std::vector<IntermediateConfig> resolve_apache_contexts(const std::vector<DirectiveNode>& tree,
                                                        const std::string& path) {
    std::vector<const DirectiveNode*> global_leaves;
    collect_scope_leaves(tree, global_leaves, true);
    std::vector<const DirectiveNode*> vhosts;
    collect_vhosts(tree, vhosts);

    std::vector<IntermediateConfig> contexts;
    for (size_t index = 0; index < vhosts.size(); ++index) {
        const DirectiveNode& vhost = *vhosts[index];
        std::vector<const DirectiveNode*> vhost_leaves;
        collect_scope_leaves(vhost.children, vhost_leaves, true);

        IntermediateConfig config;
        config.technology = Technology::apache;
        config.source_file = path;
        config.ordinal = static_cast<int>(index);
        const std::string address = vhost.args.empty() ? "*" : vhost.args[0];
        config.context_label = "vhost " + address;
        config.context_id = path + "#" + std::to_string(index) + ":vhost " + address;

        config.endpoints.push_back({"VirtualHost", join(vhost.args, " "), vhost.source, 0});

        ApacheLookup server_name = lookup(vhost_leaves, global_leaves, "ServerName", false);
        if (!server_name.occurrences.empty()) {
            const DirectiveOccurrence& occ = server_name.occurrences.back();
            config.hostname = StructuralValue{"ServerName", occ.raw_value, occ.source, occ.inheritance_depth};
        }

        ApacheLookup engine = lookup(vhost_leaves, global_leaves, "SSLEngine", false);
        config.tls_enabled = !engine.occurrences.empty() &&
                             iequals(trim(engine.occurrences.back().raw_value), "on");

        for (const std::string& canonical : allowlist_names(Technology::apache)) {
            ApacheLookup found =
                lookup(vhost_leaves, global_leaves, canonical, is_additive_directive(Technology::apache, canonical));
            if (found.occurrences.empty()) continue;
            if (canonical == "Header") {
                // Header [always] set|add Strict-Transport-Security "..."
                std::erase_if(found.occurrences, [](const DirectiveOccurrence& occ) {
                    auto args = split_ws(occ.raw_value);
                    return std::none_of(args.begin(), args.end(), [](const std::string& arg) {
                        return iequals(arg, "Strict-Transport-Security");
                    });
                });
                if (found.occurrences.empty()) continue;
            }
            for (const SourceLoc& loc : found.shadowed)
                config.warnings.push_back(
                    {"shadowed-directive", "duplicate '" + canonical + "' in one scope; last occurrence wins", loc});
            config.directives[canonical] = EffectiveDirective{std::move(found.occurrences)};
        }
        contexts.push_back(std::move(config));
    }
    return contexts;
}

}  // namespace cryptoscope
