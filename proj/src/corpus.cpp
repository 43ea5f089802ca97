#include "cryptoscope/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cryptoscope/apache_parser.hpp"
#include "cryptoscope/nginx_parser.hpp"
#include "cryptoscope/springboot_parser.hpp"

namespace cryptoscope {

namespace fs = std::filesystem;

std::string to_string(RepoStatus status) {
    switch (status) {
        case RepoStatus::active: return "active";
        case RepoStatus::archived: return "archived";
        case RepoStatus::dormant: return "dormant";
    }
    return "active";
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &digest_len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

RepoStatus classify_repo_status(bool archived_flag, const CivilDate& last_push,
                                const CivilDate& reference_date) {
    if (last_push > reference_date)
        throw ConfigError("last_push " + to_string(last_push) + " is after reference date " +
                          to_string(reference_date));
    if (archived_flag) return RepoStatus::archived;
    if (last_push < months_before(reference_date, 24)) return RepoStatus::dormant;
    return RepoStatus::active;
}

// ── Technology detection ───────────────────────────────────────────────────

static bool path_mentions(const std::string& path, const std::string& needle) {
    return to_lower(path).find(needle) != std::string::npos;
}

static std::string basename_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::optional<Technology> detect_technology(const std::string& relative_path,
                                            const std::string& content) {
    const std::string base = to_lower(basename_of(relative_path));

    if (base.starts_with("application") &&
        (base.ends_with(".yml") || base.ends_with(".yaml") || base.ends_with(".properties")))
        return Technology::springboot;

    if (!base.ends_with(".conf")) return std::nullopt;

    if (base == "nginx.conf" || base == "default.conf" || base == "ssl.conf")
        return Technology::nginx;
    if (base == "httpd.conf" || base == "apache2.conf") return Technology::apache;
    if (content.find("<VirtualHost") != std::string::npos) return Technology::apache;
    if (path_mentions(relative_path, "nginx")) return Technology::nginx;
    return std::nullopt;
}

// ── Manifest ───────────────────────────────────────────────────────────────

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

bool parse_bool_field(const std::string& text, bool& out) {
    const std::string lowered = to_lower(trim(text));
    if (lowered == "true" || lowered == "1" || lowered == "yes") {
        out = true;
        return true;
    }
    if (lowered == "false" || lowered == "0" || lowered == "no" || lowered.empty()) {
        out = false;
        return true;
    }
    return false;
}

ManifestRow row_from_fields(const std::map<std::string, std::string>& fields, int line_no,
                            const std::string& manifest_name) {
    auto fail = [&](const std::string& why) {
        throw ConfigError(manifest_name + ":" + std::to_string(line_no) + ": " + why);
    };
    ManifestRow row;
    auto get = [&](const char* key) {
        auto it = fields.find(key);
        return it == fields.end() ? std::string() : it->second;
    };
    row.path = trim(get("path"));
    if (row.path.empty()) fail("missing path");
    row.owner = trim(get("owner"));
    row.repo = trim(get("repo"));
    if (!parse_bool_field(get("archived"), row.archived)) fail("bad archived value '" + get("archived") + "'");
    const std::string push = trim(get("last_push"));
    if (!push.empty()) {
        auto date = parse_civil_date(push);
        if (!date) fail("bad last_push date '" + push + "'");
        row.last_push = *date;
    }
    const std::string tech = trim(get("technology"));
    if (!tech.empty()) {
        row.technology = technology_from_string(tech);
        if (!row.technology) fail("unknown technology '" + tech + "'");
    }
    const std::string sensitivity = trim(get("sensitivity"));
    if (!sensitivity.empty()) {
        try {
            row.sensitivity = std::stod(sensitivity);
        } catch (const std::exception&) {
            fail("bad sensitivity value '" + sensitivity + "'");
        }
    }
    return row;
}

}  // namespace

std::map<std::string, ManifestRow> load_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read manifest " + manifest_path.string());
    const std::string name = manifest_path.filename().string();

    std::map<std::string, ManifestRow> rows;
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    bool jsonl = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        if (line_no == 1) jsonl = trim(line).front() == '{';

        if (jsonl) {
            nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
            if (doc.is_discarded())
                throw ConfigError(name + ":" + std::to_string(line_no) + ": malformed JSON line");
            std::map<std::string, std::string> fields;
            for (auto& [key, value] : doc.items())
                fields[key] = value.is_string() ? value.get<std::string>() : value.dump();
            ManifestRow row = row_from_fields(fields, line_no, name);
            rows[row.path] = row;
            continue;
        }

        auto cells = split_csv_line(line);
        if (header.empty()) {
            for (auto& cell : cells) header.push_back(to_lower(trim(cell)));
            if (std::find(header.begin(), header.end(), "path") == header.end())
                throw ConfigError(name + ":1: header row must name a 'path' column");
            continue;
        }
        if (cells.size() > header.size())
            throw ConfigError(name + ":" + std::to_string(line_no) + ": more cells than header columns");
        std::map<std::string, std::string> fields;
        for (size_t i = 0; i < cells.size(); ++i) fields[header[i]] = cells[i];
        ManifestRow row = row_from_fields(fields, line_no, name);
        rows[row.path] = row;
    }
    return rows;
}

// ── Confidence rubric ──────────────────────────────────────────────────────

namespace {

bool braces_balanced(const std::string& content) {
    long depth = 0;
    for (char c : content) {
        if (c == '{') ++depth;
        if (c == '}') {
            --depth;
            if (depth < 0) return false;
        }
    }
    return depth == 0;
}

bool contains_word(const std::string& haystack, const std::string& word, bool case_insensitive) {
    const std::string text = case_insensitive ? to_lower(haystack) : haystack;
    const std::string target = case_insensitive ? to_lower(word) : word;
    size_t pos = 0;
    while ((pos = text.find(target, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !(std::isalnum(static_cast<unsigned char>(text[pos - 1])) ||
                                           text[pos - 1] == '_');
        const size_t end = pos + target.size();
        const bool right_ok = end >= text.size() ||
                              !(std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_');
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

bool has_tls_directive(const std::string& content, Technology hint) {
    static const std::vector<std::string> nginx_markers = {
        "ssl_protocols", "ssl_ciphers",        "ssl_certificate", "ssl_certificate_key",
        "ssl_stapling",  "ssl_session_cache",  "ssl_ecdh_curve",  "ssl_verify_client",
        "ssl_dhparam",   "ssl_prefer_server_ciphers"};
    static const std::vector<std::string> apache_markers = {
        "SSLEngine",        "SSLProtocol",           "SSLCipherSuite",   "SSLCertificateFile",
        "SSLCertificateKeyFile", "SSLHonorCipherOrder", "SSLVerifyClient", "SSLUseStapling"};

    auto any = [&](const std::vector<std::string>& markers, bool ci) {
        return std::any_of(markers.begin(), markers.end(),
                           [&](const std::string& m) { return contains_word(content, m, ci); });
    };
    switch (hint) {
        case Technology::nginx: return any(nginx_markers, false);
        case Technology::apache: return any(apache_markers, true);
        case Technology::springboot:
            return content.find("server.ssl.") != std::string::npos ||
                   (contains_word(content, "ssl", false) && content.find("server") != std::string::npos);
        case Technology::unknown:
            return any(nginx_markers, false) || any(apache_markers, true) ||
                   content.find("server.ssl.") != std::string::npos;
    }
    return false;
}

bool has_context_opener(const std::string& content, Technology hint) {
    auto nginx_opener = [&] {
        size_t pos = 0;
        while ((pos = content.find("server", pos)) != std::string::npos) {
            size_t after = pos + 6;
            while (after < content.size() &&
                   (content[after] == ' ' || content[after] == '\t' || content[after] == '\n' ||
                    content[after] == '\r'))
                ++after;
            if (after < content.size() && content[after] == '{') return true;
            pos += 6;
        }
        return false;
    };
    auto spring_opener = [&] {
        if (content.find("server.ssl") != std::string::npos) return true;
        std::istringstream lines(content);
        std::string line;
        while (std::getline(lines, line)) {
            if (trim(line) == "server:") return true;
        }
        return false;
    };
    switch (hint) {
        case Technology::nginx: return nginx_opener();
        case Technology::apache: return content.find("<VirtualHost") != std::string::npos;
        case Technology::springboot: return spring_opener();
        case Technology::unknown:
            return nginx_opener() || content.find("<VirtualHost") != std::string::npos ||
                   spring_opener();
    }
    return false;
}

bool parse_attempt_succeeds(const std::string& content, Technology hint) {
    CorpusEntry probe;
    probe.path = "<probe>";
    probe.content = content;
    probe.technology_hint = hint;
    switch (hint) {
        case Technology::nginx: return parse_nginx(probe).ok();
        case Technology::apache: return parse_apache(probe).ok();
        case Technology::springboot: return parse_springboot(probe).ok();
        case Technology::unknown: return false;
    }
    return false;
}

}  // namespace

double classify_confidence(const std::string& content, Technology hint) {
    if (trim(content).empty()) return 0.0;
    double score = 0.0;
    if (braces_balanced(content)) score += 0.2;
    if (has_tls_directive(content, hint)) score += 0.4;
    if (has_context_opener(content, hint)) score += 0.3;
    if (parse_attempt_succeeds(content, hint)) score += 0.1;
    return std::min(score, 1.0);
}

// ── Corpus loading ─────────────────────────────────────────────────────────

LoadResult load_corpus(const fs::path& root,
                       const std::optional<fs::path>& manifest_path,
                       const CivilDate& reference_date) {
    LoadResult result;
    std::error_code ec;
    if (!fs::is_directory(root, ec) || ec)
        throw ConfigError("corpus root " + root.string() + " is not a readable directory");

    std::map<std::string, ManifestRow> manifest;
    if (manifest_path) manifest = load_manifest(*manifest_path);

    std::vector<std::string> paths;
    for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file(ec) || ec) continue;
        paths.push_back(fs::relative(it->path(), root).generic_string());
    }
    std::sort(paths.begin(), paths.end());

    for (const std::string& rel : paths) {
        std::ifstream in(root / rel, std::ios::binary);
        if (!in) {
            result.warnings.push_back({"unreadable-file", "cannot read " + rel, {rel, 0, 0}});
            continue;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        std::string content = buffer.str();

        auto manifest_it = manifest.find(rel);
        std::optional<Technology> tech;
        if (manifest_it != manifest.end() && manifest_it->second.technology)
            tech = manifest_it->second.technology;
        else
            tech = detect_technology(rel, content);
        if (!tech) {
            if (manifest_it != manifest.end()) tech = Technology::unknown;
            else continue;  // not a corpus candidate
        }

        CorpusEntry entry;
        entry.path = rel;
        entry.technology_hint = *tech;
        entry.content_hash = sha256_hex(content);
        entry.content = std::move(content);
        if (manifest_it != manifest.end()) {
            const ManifestRow& row = manifest_it->second;
            RepoMeta meta;
            meta.owner = row.owner;
            meta.repo = row.repo;
            meta.archived_flag = row.archived;
            meta.last_push = row.last_push;
            meta.sensitivity = row.sensitivity;
            meta.status = classify_repo_status(row.archived, row.last_push, reference_date);
            entry.repo_meta = meta;
        }
        entry.confidence = classify_confidence(entry.content, entry.technology_hint);
        result.entries.push_back(std::move(entry));
    }
    return result;
}

std::vector<CorpusEntry> dedupe(const std::vector<CorpusEntry>& entries) {
    std::vector<CorpusEntry> survivors;
    std::set<std::string> seen_hashes;
    std::set<std::string> seen_triples;
    for (const CorpusEntry& entry : entries) {
        if (seen_hashes.contains(entry.content_hash)) continue;
        if (entry.repo_meta) {
            const std::string triple =
                entry.repo_meta->owner + "\x1f" + entry.repo_meta->repo + "\x1f" + entry.path;
            if (seen_triples.contains(triple)) continue;
            seen_triples.insert(triple);
        }
        seen_hashes.insert(entry.content_hash);
        survivors.push_back(entry);
    }
    return survivors;
}

}  // namespace cryptoscope
