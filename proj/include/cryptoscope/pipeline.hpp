#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cryptoscope/analytics.hpp"
#include "cryptoscope/corpus.hpp"
#include "cryptoscope/intermediate.hpp"
#include "cryptoscope/mapping.hpp"
#include "cryptoscope/policy.hpp"

namespace cryptoscope {

inline constexpr const char* kSchemaVersion = "1";

struct RunOptions {
    std::filesystem::path root;
    std::optional<std::filesystem::path> manifest;
    std::map<Technology, MappingSpec> mappings;
    double confidence_threshold = 0.5;
    /// Repo-liveness reference date; when unset, the latest manifest
    /// last_push date is used (keeps runs reproducible without wall-clock).
    std::optional<CivilDate> reference_date;
    int jobs = 1;
};

struct FileEntry {
    std::string path;
    std::string content_hash;
    Technology technology = Technology::unknown;
    double confidence = 0.0;
    bool parsed = false;
    int contexts = 0;
    int tls_contexts = 0;
    std::optional<RepoMeta> repo;
};

/// The cryptographic inventory of one corpus run: one record per TLS
/// context, ordered by (file, context ordinal, endpoint ordinal).
struct Inventory {
    CivilDate reference_date;
    double confidence_threshold = 0.5;
    std::vector<FileEntry> files;
    std::vector<ContextRecord> records;
    std::vector<IntermediateConfig> intermediates;  // all contexts, non-TLS included
    std::vector<Warning> warnings;

    std::vector<FileSummary> file_summaries() const;
    bool empty() const { return files.empty(); }
};

/// ingest -> parse -> resolve -> normalize -> classify. Per-file failures
/// become warnings, never abort the run. Deterministic output regardless of
/// `jobs`.
Inventory discover(const RunOptions& options);

/// Runs every policy plus the quantum-readiness assessment over an
/// inventory.
struct AssessmentResult {
    std::vector<PolicyReport> reports;
    std::vector<std::pair<std::string, QuantumAssessment>> quantum;  // context_id -> assessment
    int fail_count = 0;
};
AssessmentResult assess(const Inventory& inventory, const std::vector<Policy>& policies);

/// Migration-priority ranking: no-forward-secrecy contexts first, then
/// forward-secret ones; resistant contexts are excluded. Within a tier:
/// higher sensitivity first, HSM-backed last, port 443 before others, ties
/// by context_id.
struct PrioritizedTarget {
    int rank = 0;
    std::string context_id;
    QuantumRisk risk = QuantumRisk::vulnerable_fs;
    bool hsm_backed = false;
    std::optional<int> port;
    double sensitivity = 0.0;
    std::string rationale;
};
std::vector<PrioritizedTarget> prioritize(const Inventory& inventory);

// ── Serialization ──────────────────────────────────────────────────────────

nlohmann::ordered_json inventory_to_json(const Inventory& inventory);
Inventory inventory_from_json(const nlohmann::json& doc);

nlohmann::ordered_json assessment_to_json(const AssessmentResult& result,
                                          const std::vector<Policy>& policies);
nlohmann::ordered_json prioritize_to_json(const std::vector<PrioritizedTarget>& targets);
nlohmann::ordered_json diff_to_json(const DiffSummary& diff);
nlohmann::ordered_json intermediates_to_json(const Inventory& inventory);

/// Serializes with a trailing newline; all writers route through here so
/// outputs stay byte-stable.
std::string to_stable_string(const nlohmann::ordered_json& doc);

/// Atomic write (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cryptoscope
