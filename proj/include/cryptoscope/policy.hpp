#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/classify.hpp"
#include "cryptoscope/utm.hpp"

namespace cryptoscope {

enum class Requirement {
    must_include,
    must_exclude,
    must_equal,
    must_be_set,
    must_be_unset,
    min_value,
    all_tokens_satisfy
};

enum class Severity { fail, warn };

std::string to_string(Requirement requirement);
std::string to_string(Severity severity);

struct PolicyRule {
    std::string id;
    std::string utm_field;
    Requirement requirement = Requirement::must_be_set;
    std::string parameter;  // unused by must_be_set / must_be_unset
    Severity severity = Severity::fail;
};

struct Policy {
    std::string id;
    std::string name;
    std::vector<PolicyRule> rules;
};

struct PolicyFinding {
    std::string rule_id;
    Severity severity = Severity::fail;
    std::string observed;  // "unset" when the field is absent
    std::optional<Provenance> provenance;
};

struct PolicyReport {
    std::string context_id;
    std::string policy_id;
    bool pass = true;  // no fail-severity finding
    std::vector<PolicyFinding> findings;
};

/// Token predicates usable as the all_tokens_satisfy parameter.
const std::vector<std::string>& token_predicate_names();

/// Loads and validates a policy file: known requirement keywords, known
/// utm_field paths, unique rule ids, parameter arity.
Policy load_policy(const std::filesystem::path& path);

/// Evaluates every rule independently; never aborts mid-policy.
/// must_include / must_equal / min_value / must_be_set fail on unset
/// fields, must_exclude and all_tokens_satisfy pass vacuously.
PolicyReport evaluate(const UnifiedTlsModel& utm, const Policy& policy,
                      const std::string& context_id,
                      const CipherTable& suites = CipherTable::builtin());

// ── Quantum readiness ──────────────────────────────────────────────────────

enum class QuantumRisk { resistant, vulnerable_fs, vulnerable_no_fs };

std::string to_string(QuantumRisk risk);

struct QuantumFinding {
    std::string component;  // offending key-exchange element
    std::string detail;
    std::optional<Provenance> provenance;
};

struct QuantumAssessment {
    QuantumRisk risk_level = QuantumRisk::vulnerable_fs;
    std::vector<QuantumFinding> findings;
};

/// Risk from the context key-exchange category: hybrid curve -> resistant,
/// ephemeral (or TLS 1.3) -> vulnerable_fs, RSA key transport ->
/// vulnerable_no_fs. Indeterminate contexts report vulnerable_fs with an
/// explanatory finding.
QuantumAssessment quantum_readiness(const UnifiedTlsModel& utm,
                                    const CipherTable& suites = CipherTable::builtin(),
                                    const CurveTable& curves = CurveTable::builtin());

// ── Report diffing ─────────────────────────────────────────────────────────

enum class ReportChange { improved, regressed, unchanged, added, removed };

std::string to_string(ReportChange change);

struct ReportDelta {
    std::string context_id;
    std::string policy_id;
    ReportChange change = ReportChange::unchanged;
    std::string detail;
};

struct DiffSummary {
    std::vector<ReportDelta> deltas;
    int improved = 0;
    int regressed = 0;
    int unchanged = 0;
    int added = 0;
    int removed = 0;

    bool has_regression() const { return regressed > 0; }
};

/// Keyed by (context_id, policy_id). A regression is any pass -> fail flip
/// or any new fail-severity finding; warn-level churn is ignored.
DiffSummary diff_reports(const std::vector<PolicyReport>& before,
                         const std::vector<PolicyReport>& after);

}  // namespace cryptoscope
