#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cryptoscope/classify.hpp"
#include "cryptoscope/corpus.hpp"
#include "cryptoscope/policy.hpp"
#include "cryptoscope/utm.hpp"

namespace cryptoscope {

/// Per-context crypto classification bundle produced by the pipeline and
/// consumed by analytics and reporting.
struct ContextAnalysis {
    std::vector<CipherClassification> suite_classifications;  // kind=suite tokens only
    KexCategory context_kex = KexCategory::unknown;
    QuantumAssessment quantum;
    std::vector<std::pair<std::string, CurveClass>> curves;
    std::optional<KeyRefKind> key_ref;
    std::optional<CertOrigin> cert_origin;
    std::optional<CertChainKind> cert_chain;
    std::vector<std::pair<std::string, StorageKind>> storage_paths;  // cert + key paths
    HostnameClass hostname_class = HostnameClass::empty;
    std::set<std::string> legacy_presets;  // negation preserved
    bool mixed_strength = false;
    bool explicit_ciphers = false;  // suite token list came from a directive
    bool has_dhparam = false;       // native DH-parameter directive present
    bool mtls = false;              // client_auth optional or required
    int cipher_token_count = 0;     // tokens of any kind in the cipher string
};

/// One TLS context as analytics sees it.
struct ContextRecord {
    std::string context_id;
    std::string file;  // corpus-relative source path
    int ordinal = 0;
    UnifiedTlsModel utm;
    ContextAnalysis analysis;
    std::optional<RepoStatus> repo_status;  // nullopt = no metadata
};

/// Per-file rollup (covers non-TLS contexts too, for coexistence metrics).
struct FileSummary {
    std::string path;
    Technology technology = Technology::unknown;
    int contexts = 0;
    int tls_contexts = 0;
    std::optional<RepoStatus> repo_status;
};

// ── Metric values ──────────────────────────────────────────────────────────

/// A fraction with an explicit denominator; undefined (0/0) serializes as
/// null rather than a silent zero.
struct Fraction {
    long long numerator = 0;
    long long denominator = 0;

    bool defined() const { return denominator != 0; }
    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

struct DriftStat {
    int files_multi_context = 0;
    int files_drifting = 0;
    Fraction rate;
};

struct CorpusMetrics {
    struct Totals {
        int files = 0;
        int contexts = 0;
        int tls_contexts = 0;
        int explicit_cipher_contexts = 0;
        int curve_setting_contexts = 0;
        int tls_files = 0;
    } totals;

    std::map<std::string, Fraction> rq1_protocol_adoption;  // per version, over TLS contexts

    struct WeakTokenStats {
        int contexts_with_explicit_ciphers = 0;
        Fraction weak_fraction;
        // (pair, count) sorted by count desc then name; top 5
        std::vector<std::pair<std::string, int>> top_cooccurring_pairs;
    } rq2_weak_token;

    std::map<std::string, Fraction> rq3_kex_categories;

    struct CertKeyPresence {
        Fraction cert, key, dhparam, hsm, env_var_paths;
    } rq4_cert_key_presence;

    Fraction rq5_hsts_fraction;

    struct MtlsSplit {
        Fraction overall, active, archived_or_dormant;
    } rq6_mtls_fraction;

    Fraction rq7_mixed_strength_fraction;

    // preset -> stratum ("active"/"archived_or_dormant") -> fraction of
    // explicit-cipher contexts in that stratum
    std::map<std::string, std::map<std::string, Fraction>> rq8_legacy_presets;

    std::map<std::string, DriftStat> rq9_internal_drift;  // ciphers/hsts/protocols/prefer_server_order

    struct StatusRollup {
        Fraction active, archived_or_dormant;
    } rq10_legacy_preset_usage;

    struct AeadCbc {
        Fraction aead_only_fraction;
        Fraction cbc_any_fraction;
        std::optional<double> mean_aead_share;  // over contexts with >=1 classifiable suite
        std::optional<double> mean_cbc_share;
    } rq11_aead_cbc;

    Fraction rq12_prefer_server_ciphers_fraction;
    // joint distribution over explicit-cipher contexts:
    // keys set_weak / set_clean / unset_weak / unset_clean
    std::map<std::string, Fraction> rq12_order_vs_weak;

    std::map<std::string, int> rq13_curve_distribution;            // curve -> count
    std::map<int, int> rq14_cipher_length_histogram;               // token count -> contexts
    std::map<std::string, Fraction> rq15_session_cache_distribution;
    std::map<std::string, Fraction> rq16_cert_origin_distribution;  // over cert-bearing contexts
    std::map<std::string, Fraction> rq17_bundle_vs_leaf;
    std::map<std::string, Fraction> rq18_storage_distribution;      // over cert+key paths

    struct Coexistence {
        int tls_files = 0;
        int coexisting = 0;
        Fraction fraction;
    } rq19_plaintext_coexistence;

    std::map<std::string, Fraction> rq20_hostname_distribution;
    Fraction rq20_non_production;
};

/// All RQ metrics over the given contexts and file rollups. Distributions
/// over exhaustive category sets carry every category, zero-count ones
/// included. Empty denominators yield undefined fractions.
CorpusMetrics compute_metrics(const std::vector<ContextRecord>& records,
                              const std::vector<FileSummary>& files);

/// Per-field posture drift across multi-TLS-context files. A file drifts on
/// a field when two of its TLS contexts disagree on the normalized value
/// (unset counts as a value).
std::map<std::string, DriftStat> internal_drift(const std::vector<ContextRecord>& records,
                                                const std::vector<FileSummary>& files);

CorpusMetrics::Coexistence plaintext_coexistence(const std::vector<FileSummary>& files);

/// Recomputes the metrics over one repo-status stratum; contexts without
/// metadata fall into the "unknown" stratum.
CorpusMetrics status_split(const std::vector<ContextRecord>& records,
                           const std::vector<FileSummary>& files, const std::string& stratum);

nlohmann::ordered_json metrics_to_json(const CorpusMetrics& metrics);
std::string metrics_to_text(const CorpusMetrics& metrics);
/// One CSV per distribution, keyed by file name.
std::map<std::string, std::string> metrics_to_csv(const CorpusMetrics& metrics);

}  // namespace cryptoscope
