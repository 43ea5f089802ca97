#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/common.hpp"

namespace cryptoscope {

enum class RepoStatus { active, archived, dormant };

std::string to_string(RepoStatus status);

struct RepoMeta {
    std::string owner;
    std::string repo;
    bool archived_flag = false;
    CivilDate last_push;
    RepoStatus status = RepoStatus::active;
    // Optional operator-supplied migration-priority weight; 0 when absent.
    double sensitivity = 0.0;
};

/// One raw configuration file plus repository metadata. `path` is relative
/// to the corpus root; `content_hash` is the lowercase hex SHA-256 of the
/// exact file bytes.
struct CorpusEntry {
    std::string path;
    Technology technology_hint = Technology::unknown;
    std::string content;
    std::string content_hash;
    std::optional<RepoMeta> repo_meta;
    double confidence = 0.0;
};

struct ManifestRow {
    std::string path;
    std::string owner;
    std::string repo;
    bool archived = false;
    CivilDate last_push;
    std::optional<Technology> technology;
    double sensitivity = 0.0;
};

struct LoadResult {
    std::vector<CorpusEntry> entries;
    std::vector<Warning> warnings;
};

std::string sha256_hex(const std::string& bytes);

/// Reads a manifest (CSV with a header row, or JSON lines) and returns rows
/// keyed by path. Throws ConfigError naming the offending line on malformed
/// input. Recognized columns: path, owner, repo, archived, last_push,
/// technology (optional), sensitivity (optional).
std::map<std::string, ManifestRow> load_manifest(const std::filesystem::path& manifest_path);

/// Walks `root`, selects candidate files by the technology filename
/// heuristics (manifest `technology` overrides), hashes content, joins
/// manifest metadata, and scores confidence. Entries are ordered by
/// lexicographically sorted relative path. Repo status inside the returned
/// entries is resolved against `reference_date`.
LoadResult load_corpus(const std::filesystem::path& root,
                       const std::optional<std::filesystem::path>& manifest_path,
                       const CivilDate& reference_date);

/// Drops entries repeating an already-seen content hash or (owner, repo,
/// path) triple. First occurrence wins; survivor order is input order.
std::vector<CorpusEntry> dedupe(const std::vector<CorpusEntry>& entries);

/// Deterministic structural-marker score in [0,1]. Rubric: balanced braces
/// +0.2, at least one known TLS directive +0.4, at least one context opener
/// +0.3, successful parse attempt +0.1; empty content scores 0.
double classify_confidence(const std::string& content, Technology hint);

/// archived flag dominates; otherwise dormant when last_push is more than
/// 24 months before reference_date. Throws ConfigError when last_push is in
/// the future.
RepoStatus classify_repo_status(bool archived_flag, const CivilDate& last_push,
                                const CivilDate& reference_date);

/// Technology detection for one candidate file (filename heuristics plus
/// the `<VirtualHost` content probe). nullopt means "not a corpus file".
std::optional<Technology> detect_technology(const std::string& relative_path,
                                            const std::string& content);

}  // namespace cryptoscope
