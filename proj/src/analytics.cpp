#include "cryptoscope/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cryptoscope {

namespace {

// Endpoint fan-out produces one record per TLS listen port; context-level
// metrics must count each (file, ordinal) context once.
std::vector<const ContextRecord*> unique_contexts(const std::vector<ContextRecord>& records) {
    std::vector<const ContextRecord*> out;
    std::set<std::pair<std::string, int>> seen;
    for (const ContextRecord& record : records)
        if (seen.insert({record.file, record.ordinal}).second) out.push_back(&record);
    return out;
}

std::optional<std::string> stratum_of(const std::optional<RepoStatus>& status) {
    if (!status) return std::nullopt;
    return *status == RepoStatus::active ? "active" : "archived_or_dormant";
}

bool context_has_weak_token(const ContextRecord& record) {
    for (const CipherClassification& c : record.analysis.suite_classifications)
        if (!c.token.negated && !c.weak_flags.empty()) return true;
    const UnifiedTlsModel& utm = record.utm;
    for (const CipherToken& token : utm.ciphers.suite_tokens) {
        if (token.negated || token.kind != TokenKind::preset) continue;
        if (PresetTable::builtin().weak_flag(token.text)) return true;
    }
    return false;
}

bool prefer_order_on(const ContextRecord& record) {
    return record.utm.ciphers.prefer_server_order.value_or(false);
}

std::string drift_value(const ContextRecord& record, const std::string& field) {
    const UnifiedTlsModel& utm = record.utm;
    if (field == "ciphers") {
        if (!utm.ciphers.suite_tokens_set) return "unset";
        std::vector<std::string> parts;
        for (const CipherToken& t : utm.ciphers.suite_tokens)
            parts.push_back((t.negated ? "!" : "") + t.text);
        return join(parts, ":");
    }
    if (field == "hsts") {
        if (!utm.security_headers.hsts_present) return "absent";
        std::string out = "present";
        out += ":" + (utm.security_headers.hsts_max_age
                          ? std::to_string(*utm.security_headers.hsts_max_age)
                          : std::string("-"));
        out += ":" + (utm.security_headers.hsts_subdomains
                          ? std::string(*utm.security_headers.hsts_subdomains ? "sub" : "nosub")
                          : std::string("-"));
        return out;
    }
    if (field == "protocols") {
        if (!utm.protocols) return "unset";
        std::vector<std::string> parts;
        for (TlsVersion v : *utm.protocols) parts.push_back(to_string(v));
        return join(parts, " ");
    }
    if (field == "prefer_server_order") {
        if (!utm.ciphers.prefer_server_order) return "unset";
        return *utm.ciphers.prefer_server_order ? "true" : "false";
    }
    return "";
}

}  // namespace

std::map<std::string, DriftStat> internal_drift(const std::vector<ContextRecord>& records,
                                                const std::vector<FileSummary>& files) {
    (void)files;
    std::map<std::string, std::vector<const ContextRecord*>> by_file;
    for (const ContextRecord* record : unique_contexts(records))
        by_file[record->file].push_back(record);

    std::map<std::string, DriftStat> out;
    for (const char* field : {"ciphers", "hsts", "protocols", "prefer_server_order"}) {
        DriftStat stat;
        for (const auto& [file, contexts] : by_file) {
            if (contexts.size() < 2) continue;
            ++stat.files_multi_context;
            std::set<std::string> values;
            for (const ContextRecord* record : contexts) values.insert(drift_value(*record, field));
            if (values.size() > 1) ++stat.files_drifting;
        }
        stat.rate = {stat.files_drifting, stat.files_multi_context};
        out[field] = stat;
    }
    return out;
}

CorpusMetrics::Coexistence plaintext_coexistence(const std::vector<FileSummary>& files) {
    CorpusMetrics::Coexistence out;
    for (const FileSummary& file : files) {
        if (file.tls_contexts < 1) continue;
        ++out.tls_files;
        if (file.contexts > file.tls_contexts) ++out.coexisting;
    }
    out.fraction = {out.coexisting, out.tls_files};
    return out;
}

CorpusMetrics compute_metrics(const std::vector<ContextRecord>& records,
                              const std::vector<FileSummary>& files) {
    CorpusMetrics m;
    const std::vector<const ContextRecord*> contexts = unique_contexts(records);
    const long long tls_n = static_cast<long long>(contexts.size());

    m.totals.files = static_cast<int>(files.size());
    for (const FileSummary& file : files) m.totals.contexts += file.contexts;
    m.totals.tls_contexts = static_cast<int>(tls_n);
    for (const FileSummary& file : files)
        if (file.tls_contexts > 0) ++m.totals.tls_files;

    std::vector<const ContextRecord*> explicit_ciphers;
    std::vector<const ContextRecord*> curve_setting;
    std::vector<const ContextRecord*> cert_bearing;
    for (const ContextRecord* c : contexts) {
        if (c->analysis.explicit_ciphers) explicit_ciphers.push_back(c);
        if (!c->utm.ciphers.ecdh_curves.empty()) curve_setting.push_back(c);
        if (c->utm.certificates.cert_path) cert_bearing.push_back(c);
    }
    const long long explicit_n = static_cast<long long>(explicit_ciphers.size());
    m.totals.explicit_cipher_contexts = static_cast<int>(explicit_n);
    m.totals.curve_setting_contexts = static_cast<int>(curve_setting.size());

    // RQ1 protocol adoption
    for (TlsVersion v : {TlsVersion::SSLv3, TlsVersion::TLSv1_0, TlsVersion::TLSv1_1,
                         TlsVersion::TLSv1_2, TlsVersion::TLSv1_3}) {
        long long count = 0;
        for (const ContextRecord* c : contexts)
            if (c->utm.protocols && c->utm.protocols->contains(v)) ++count;
        m.rq1_protocol_adoption[to_string(v)] = {count, tls_n};
    }

    // RQ2 weak tokens + co-occurring pairs
    m.rq2_weak_token.contexts_with_explicit_ciphers = static_cast<int>(explicit_n);
    {
        long long weak = 0;
        for (const ContextRecord* c : explicit_ciphers)
            if (context_has_weak_token(*c)) ++weak;
        m.rq2_weak_token.weak_fraction = {weak, explicit_n};

        std::map<std::string, int> pair_counts;
        for (const ContextRecord* c : explicit_ciphers) {
            std::set<std::string> names;
            for (const CipherToken& t : c->utm.ciphers.suite_tokens)
                if (!t.negated && t.kind == TokenKind::suite) names.insert(t.text);
            for (auto a = names.begin(); a != names.end(); ++a)
                for (auto b = std::next(a); b != names.end(); ++b)
                    ++pair_counts[*a + " + " + *b];
        }
        std::vector<std::pair<std::string, int>> pairs(pair_counts.begin(), pair_counts.end());
        std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second > y.second : x.first < y.first;
        });
        if (pairs.size() > 5) pairs.resize(5);
        m.rq2_weak_token.top_cooccurring_pairs = std::move(pairs);
    }

    // RQ3 key-exchange categories
    for (const char* name : {"ecdhe_dhe", "rsa_kex", "pqc_hybrid", "unknown"}) {
        long long count = 0;
        for (const ContextRecord* c : contexts)
            if (to_string(c->analysis.context_kex) == name) ++count;
        m.rq3_kex_categories[name] = {count, tls_n};
    }

    // RQ4 certificate & key management
    {
        long long cert = 0, key = 0, dhparam = 0, hsm = 0, env = 0;
        for (const ContextRecord* c : contexts) {
            if (c->utm.certificates.cert_path) ++cert;
            if (c->utm.certificates.key_path) ++key;
            if (c->analysis.has_dhparam) ++dhparam;
            if (c->analysis.key_ref &&
                (*c->analysis.key_ref == KeyRefKind::pkcs11_uri ||
                 *c->analysis.key_ref == KeyRefKind::engine_ref))
                ++hsm;
            const bool env_path =
                (c->utm.certificates.cert_path && has_interpolation(*c->utm.certificates.cert_path)) ||
                (c->utm.certificates.key_path && has_interpolation(*c->utm.certificates.key_path));
            if (env_path) ++env;
        }
        m.rq4_cert_key_presence = {{cert, tls_n}, {key, tls_n}, {dhparam, tls_n}, {hsm, tls_n},
                                   {env, tls_n}};
    }

    // RQ5 HSTS
    {
        long long hsts = 0;
        for (const ContextRecord* c : contexts)
            if (c->utm.security_headers.hsts_present) ++hsts;
        m.rq5_hsts_fraction = {hsts, tls_n};
    }

    // RQ6 mTLS overall + per status
    {
        long long mtls = 0, active = 0, active_mtls = 0, arch = 0, arch_mtls = 0;
        for (const ContextRecord* c : contexts) {
            if (c->analysis.mtls) ++mtls;
            auto stratum = stratum_of(c->repo_status);
            if (!stratum) continue;
            if (*stratum == "active") {
                ++active;
                if (c->analysis.mtls) ++active_mtls;
            } else {
                ++arch;
                if (c->analysis.mtls) ++arch_mtls;
            }
        }
        m.rq6_mtls_fraction = {{mtls, tls_n}, {active_mtls, active}, {arch_mtls, arch}};
    }

    // RQ7 mixed strength
    {
        long long mixed = 0;
        for (const ContextRecord* c : explicit_ciphers)
            if (c->analysis.mixed_strength) ++mixed;
        m.rq7_mixed_strength_fraction = {mixed, explicit_n};
    }

    // RQ8 legacy presets per repo status
    {
        long long active_n = 0, arch_n = 0;
        for (const ContextRecord* c : explicit_ciphers) {
            auto stratum = stratum_of(c->repo_status);
            if (!stratum) continue;
            (*stratum == "active" ? active_n : arch_n) += 1;
        }
        for (const char* preset : {"HIGH", "!aNULL", "!eNULL", "!MD5"}) {
            long long active_count = 0, arch_count = 0;
            for (const ContextRecord* c : explicit_ciphers) {
                if (!c->analysis.legacy_presets.contains(preset)) continue;
                auto stratum = stratum_of(c->repo_status);
                if (!stratum) continue;
                (*stratum == "active" ? active_count : arch_count) += 1;
            }
            m.rq8_legacy_presets[preset] = {{"active", {active_count, active_n}},
                                            {"archived_or_dormant", {arch_count, arch_n}}};
        }

        // RQ10 any-legacy-preset rollup over the same strata
        long long active_legacy = 0, arch_legacy = 0;
        for (const ContextRecord* c : explicit_ciphers) {
            if (c->analysis.legacy_presets.empty()) continue;
            auto stratum = stratum_of(c->repo_status);
            if (!stratum) continue;
            (*stratum == "active" ? active_legacy : arch_legacy) += 1;
        }
        m.rq10_legacy_preset_usage = {{active_legacy, active_n}, {arch_legacy, arch_n}};
    }

    // RQ9 drift
    m.rq9_internal_drift = internal_drift(records, files);

    // RQ11 AEAD vs CBC
    {
        long long aead_only = 0, cbc_any = 0;
        double aead_share_sum = 0.0, cbc_share_sum = 0.0;
        long long share_contexts = 0;
        for (const ContextRecord* c : explicit_ciphers) {
            int classifiable = 0, aead = 0, cbc = 0;
            for (const CipherClassification& cls : c->analysis.suite_classifications) {
                if (cls.token.negated) continue;
                if (!cls.aead.has_value()) continue;  // unparseable name
                ++classifiable;
                if (*cls.aead) ++aead;
                if (cls.components.mode == "CBC") ++cbc;
            }
            if (classifiable == 0) continue;
            ++share_contexts;
            aead_share_sum += static_cast<double>(aead) / classifiable;
            cbc_share_sum += static_cast<double>(cbc) / classifiable;
            if (aead == classifiable) ++aead_only;
            if (cbc > 0) ++cbc_any;
        }
        m.rq11_aead_cbc.aead_only_fraction = {aead_only, explicit_n};
        m.rq11_aead_cbc.cbc_any_fraction = {cbc_any, explicit_n};
        if (share_contexts > 0) {
            m.rq11_aead_cbc.mean_aead_share = aead_share_sum / static_cast<double>(share_contexts);
            m.rq11_aead_cbc.mean_cbc_share = cbc_share_sum / static_cast<double>(share_contexts);
        }
    }

    // RQ12 cipher order preference
    {
        long long on = 0;
        for (const ContextRecord* c : contexts)
            if (prefer_order_on(*c)) ++on;
        m.rq12_prefer_server_ciphers_fraction = {on, tls_n};

        long long set_weak = 0, set_clean = 0, unset_weak = 0, unset_clean = 0;
        for (const ContextRecord* c : explicit_ciphers) {
            const bool weak = context_has_weak_token(*c);
            if (prefer_order_on(*c))
                (weak ? set_weak : set_clean) += 1;
            else
                (weak ? unset_weak : unset_clean) += 1;
        }
        m.rq12_order_vs_weak = {{"set_weak", {set_weak, explicit_n}},
                                {"set_clean", {set_clean, explicit_n}},
                                {"unset_weak", {unset_weak, explicit_n}},
                                {"unset_clean", {unset_clean, explicit_n}}};
    }

    // RQ13 curve distribution (per-context occurrence counts)
    for (const ContextRecord* c : curve_setting) {
        std::set<std::string> seen;
        for (const std::string& curve : c->utm.ciphers.ecdh_curves)
            if (seen.insert(curve).second) ++m.rq13_curve_distribution[curve];
    }

    // RQ14 cipher string length histogram
    for (const ContextRecord* c : explicit_ciphers)
        ++m.rq14_cipher_length_histogram[c->analysis.cipher_token_count];

    // RQ15 session cache
    for (const char* kind : {"unset", "off", "builtin", "shared"}) {
        long long count = 0;
        for (const ContextRecord* c : contexts)
            if (to_string(c->utm.session.cache) == kind) ++count;
        m.rq15_session_cache_distribution[kind] = {count, tls_n};
    }

    // RQ16 certificate origin (cert-bearing contexts)
    {
        const long long n = static_cast<long long>(cert_bearing.size());
        for (const char* kind : {"lets_encrypt_acme", "self_signed_indicator", "env_var", "other"}) {
            long long count = 0;
            for (const ContextRecord* c : cert_bearing)
                if (c->analysis.cert_origin && to_string(*c->analysis.cert_origin) == kind) ++count;
            m.rq16_cert_origin_distribution[kind] = {count, n};
        }
    }

    // RQ17 bundle vs leaf
    {
        const long long n = static_cast<long long>(cert_bearing.size());
        long long bundle = 0;
        for (const ContextRecord* c : cert_bearing)
            if (c->analysis.cert_chain && *c->analysis.cert_chain == CertChainKind::fullchain_bundle)
                ++bundle;
        m.rq17_bundle_vs_leaf["fullchain_bundle"] = {bundle, n};
        m.rq17_bundle_vs_leaf["leaf_only"] = {n - bundle, n};
    }

    // RQ18 storage patterns over all cert+key paths
    {
        long long total_paths = 0;
        std::map<std::string, long long> counts;
        for (const ContextRecord* c : contexts)
            for (const auto& [path, kind] : c->analysis.storage_paths) {
                ++total_paths;
                ++counts[to_string(kind)];
            }
        for (const char* kind : {"docker_secrets", "letsencrypt", "nginx_dir", "ssl_pki", "opt_srv",
                                 "env_var", "relative", "other_absolute"})
            m.rq18_storage_distribution[kind] = {counts[kind], total_paths};
    }

    // RQ19 plaintext coexistence
    m.rq19_plaintext_coexistence = plaintext_coexistence(files);

    // RQ20 hostnames
    for (const char* kind : {"domain_like", "localhost", "empty", "catch_all", "env_var",
                             "example_domain", "wildcard_only", "loopback_ip", "other"}) {
        long long count = 0;
        for (const ContextRecord* c : contexts)
            if (to_string(c->analysis.hostname_class) == kind) ++count;
        m.rq20_hostname_distribution[kind] = {count, tls_n};
    }
    {
        long long non_production = 0;
        for (const ContextRecord* c : contexts)
            if (c->analysis.hostname_class != HostnameClass::domain_like) ++non_production;
        m.rq20_non_production = {non_production, tls_n};
    }

    return m;
}

CorpusMetrics status_split(const std::vector<ContextRecord>& records,
                           const std::vector<FileSummary>& files, const std::string& stratum) {
    auto matches = [&](const std::optional<RepoStatus>& status) {
        auto s = stratum_of(status);
        if (stratum == "unknown") return !s.has_value();
        return s.has_value() && *s == stratum;
    };
    std::vector<ContextRecord> filtered_records;
    for (const ContextRecord& record : records)
        if (matches(record.repo_status)) filtered_records.push_back(record);
    std::vector<FileSummary> filtered_files;
    for (const FileSummary& file : files)
        if (matches(file.repo_status)) filtered_files.push_back(file);
    return compute_metrics(filtered_records, filtered_files);
}

// ── Serialization ──────────────────────────────────────────────────────────

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json fraction_json(const Fraction& f) {
    ordered_json doc;
    doc["count"] = f.numerator;
    doc["denominator"] = f.denominator;
    doc["fraction"] = f.defined() ? ordered_json(f.value()) : ordered_json(nullptr);
    return doc;
}

ordered_json fraction_map_json(const std::map<std::string, Fraction>& fractions) {
    ordered_json doc = ordered_json::object();
    for (const auto& [key, f] : fractions) doc[key] = fraction_json(f);
    return doc;
}

std::string percent(const Fraction& f) {
    if (!f.defined()) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", f.value() * 100.0);
    return buf;
}

}  // namespace

ordered_json metrics_to_json(const CorpusMetrics& m) {
    ordered_json doc;
    doc["schema_version"] = "1";
    doc["kind"] = "metrics";
    doc["totals"] = {{"files", m.totals.files},
                     {"contexts", m.totals.contexts},
                     {"tls_contexts", m.totals.tls_contexts},
                     {"explicit_cipher_contexts", m.totals.explicit_cipher_contexts},
                     {"curve_setting_contexts", m.totals.curve_setting_contexts},
                     {"tls_files", m.totals.tls_files}};

    doc["rq1_protocol_adoption"] = fraction_map_json(m.rq1_protocol_adoption);

    ordered_json pairs = ordered_json::array();
    for (const auto& [pair, count] : m.rq2_weak_token.top_cooccurring_pairs)
        pairs.push_back({{"pair", pair}, {"contexts", count}});
    doc["rq2_weak_token"] = {
        {"contexts_with_explicit_ciphers", m.rq2_weak_token.contexts_with_explicit_ciphers},
        {"weak_fraction", fraction_json(m.rq2_weak_token.weak_fraction)},
        {"top_cooccurring_pairs", pairs}};

    doc["rq3_kex_categories"] = fraction_map_json(m.rq3_kex_categories);

    doc["rq4_cert_key_presence"] = {{"cert", fraction_json(m.rq4_cert_key_presence.cert)},
                                    {"key", fraction_json(m.rq4_cert_key_presence.key)},
                                    {"dhparam", fraction_json(m.rq4_cert_key_presence.dhparam)},
                                    {"hsm", fraction_json(m.rq4_cert_key_presence.hsm)},
                                    {"env_var_paths", fraction_json(m.rq4_cert_key_presence.env_var_paths)}};

    doc["rq5_hsts_fraction"] = fraction_json(m.rq5_hsts_fraction);

    doc["rq6_mtls_fraction"] = {{"overall", fraction_json(m.rq6_mtls_fraction.overall)},
                                {"active", fraction_json(m.rq6_mtls_fraction.active)},
                                {"archived_or_dormant",
                                 fraction_json(m.rq6_mtls_fraction.archived_or_dormant)}};

    doc["rq7_mixed_strength_fraction"] = fraction_json(m.rq7_mixed_strength_fraction);

    ordered_json rq8 = ordered_json::object();
    for (const auto& [preset, strata] : m.rq8_legacy_presets) rq8[preset] = fraction_map_json(strata);
    doc["rq8_legacy_presets"] = rq8;

    ordered_json rq9 = ordered_json::object();
    for (const auto& [field, stat] : m.rq9_internal_drift)
        rq9[field] = {{"files_multi_context", stat.files_multi_context},
                      {"files_drifting", stat.files_drifting},
                      {"rate", fraction_json(stat.rate)}};
    doc["rq9_internal_drift"] = rq9;

    doc["rq10_legacy_preset_usage"] = {
        {"active", fraction_json(m.rq10_legacy_preset_usage.active)},
        {"archived_or_dormant", fraction_json(m.rq10_legacy_preset_usage.archived_or_dormant)}};

    doc["rq11_aead_cbc"] = {
        {"aead_only_fraction", fraction_json(m.rq11_aead_cbc.aead_only_fraction)},
        {"cbc_any_fraction", fraction_json(m.rq11_aead_cbc.cbc_any_fraction)},
        {"mean_aead_share", m.rq11_aead_cbc.mean_aead_share ? ordered_json(*m.rq11_aead_cbc.mean_aead_share)
                                                            : ordered_json(nullptr)},
        {"mean_cbc_share", m.rq11_aead_cbc.mean_cbc_share ? ordered_json(*m.rq11_aead_cbc.mean_cbc_share)
                                                          : ordered_json(nullptr)}};

    doc["rq12_prefer_server_ciphers_fraction"] = fraction_json(m.rq12_prefer_server_ciphers_fraction);
    doc["rq12_order_vs_weak"] = fraction_map_json(m.rq12_order_vs_weak);

    ordered_json rq13 = ordered_json::object();
    for (const auto& [curve, count] : m.rq13_curve_distribution) rq13[curve] = count;
    doc["rq13_curve_distribution"] = rq13;

    ordered_json rq14 = ordered_json::object();
    for (const auto& [length, count] : m.rq14_cipher_length_histogram)
        rq14[std::to_string(length)] = count;
    doc["rq14_cipher_length_histogram"] = rq14;

    doc["rq15_session_cache_distribution"] = fraction_map_json(m.rq15_session_cache_distribution);
    doc["rq16_cert_origin_distribution"] = fraction_map_json(m.rq16_cert_origin_distribution);
    doc["rq17_bundle_vs_leaf"] = fraction_map_json(m.rq17_bundle_vs_leaf);
    doc["rq18_storage_distribution"] = fraction_map_json(m.rq18_storage_distribution);

    doc["rq19_plaintext_coexistence"] = {{"tls_files", m.rq19_plaintext_coexistence.tls_files},
                                         {"coexisting", m.rq19_plaintext_coexistence.coexisting},
                                         {"fraction", fraction_json(m.rq19_plaintext_coexistence.fraction)}};

    doc["rq20_hostname_distribution"] = fraction_map_json(m.rq20_hostname_distribution);
    doc["rq20_non_production"] = fraction_json(m.rq20_non_production);
    return doc;
}

std::string metrics_to_text(const CorpusMetrics& m) {
    std::ostringstream out;
    out << "Corpus totals: " << m.totals.files << " files, " << m.totals.contexts << " contexts, "
        << m.totals.tls_contexts << " TLS-enabled contexts\n\n";

    auto table = [&](const std::string& title, const std::map<std::string, Fraction>& rows) {
        out << title << "\n";
        for (const auto& [key, f] : rows)
            out << "  " << key << ": " << percent(f) << " (" << f.numerator << "/" << f.denominator
                << ")\n";
        out << "\n";
    };

    table("RQ1 Protocol adoption (TLS-enabled contexts)", m.rq1_protocol_adoption);

    out << "RQ2 Cipher suite hygiene (explicit cipher configurations: "
        << m.rq2_weak_token.contexts_with_explicit_ciphers << ")\n"
        << "  weak-token contexts: " << percent(m.rq2_weak_token.weak_fraction) << "\n";
    for (const auto& [pair, count] : m.rq2_weak_token.top_cooccurring_pairs)
        out << "  pair: " << pair << " in " << count << " contexts\n";
    out << "\n";

    table("RQ3 Key-exchange categories", m.rq3_kex_categories);

    out << "RQ4 Certificate and key management\n"
        << "  cert path: " << percent(m.rq4_cert_key_presence.cert) << "\n"
        << "  key path: " << percent(m.rq4_cert_key_presence.key) << "\n"
        << "  dh params: " << percent(m.rq4_cert_key_presence.dhparam) << "\n"
        << "  hsm refs: " << percent(m.rq4_cert_key_presence.hsm) << "\n"
        << "  env-var paths: " << percent(m.rq4_cert_key_presence.env_var_paths) << "\n\n";

    out << "RQ5 HSTS adoption: " << percent(m.rq5_hsts_fraction) << "\n\n";

    out << "RQ6 Mutual TLS: overall " << percent(m.rq6_mtls_fraction.overall) << ", active "
        << percent(m.rq6_mtls_fraction.active) << ", archived-or-dormant "
        << percent(m.rq6_mtls_fraction.archived_or_dormant) << "\n\n";

    out << "RQ7 Mixed-strength cipher lists: " << percent(m.rq7_mixed_strength_fraction) << "\n\n";

    out << "RQ8 Legacy presets by repository status\n";
    for (const auto& [preset, strata] : m.rq8_legacy_presets) {
        out << "  " << preset << ":";
        for (const auto& [stratum, f] : strata) out << " " << stratum << " " << percent(f);
        out << "\n";
    }
    out << "\n";

    out << "RQ9 Internal drift\n";
    for (const auto& [field, stat] : m.rq9_internal_drift)
        out << "  " << field << ": " << percent(stat.rate) << " (" << stat.files_drifting << "/"
            << stat.files_multi_context << " multi-context files)\n";
    out << "\n";

    out << "RQ10 Legacy preset usage: active " << percent(m.rq10_legacy_preset_usage.active)
        << ", archived-or-dormant " << percent(m.rq10_legacy_preset_usage.archived_or_dormant)
        << "\n\n";

    out << "RQ11 AEAD vs CBC: aead-only " << percent(m.rq11_aead_cbc.aead_only_fraction)
        << ", cbc-any " << percent(m.rq11_aead_cbc.cbc_any_fraction);
    if (m.rq11_aead_cbc.mean_aead_share)
        out << ", mean aead share " << *m.rq11_aead_cbc.mean_aead_share;
    if (m.rq11_aead_cbc.mean_cbc_share) out << ", mean cbc share " << *m.rq11_aead_cbc.mean_cbc_share;
    out << "\n\n";

    out << "RQ12 Server cipher-order preference: " << percent(m.rq12_prefer_server_ciphers_fraction)
        << "\n";
    for (const auto& [key, f] : m.rq12_order_vs_weak) out << "  " << key << ": " << percent(f) << "\n";
    out << "\n";

    out << "RQ13 Curve distribution (" << m.totals.curve_setting_contexts << " curve-setting contexts)\n";
    for (const auto& [curve, count] : m.rq13_curve_distribution)
        out << "  " << curve << ": " << count << "\n";
    out << "\n";

    out << "RQ14 Cipher string length histogram\n";
    for (const auto& [length, count] : m.rq14_cipher_length_histogram)
        out << "  " << length << " tokens: " << count << " contexts\n";
    out << "\n";

    table("RQ15 Session cache", m.rq15_session_cache_distribution);
    table("RQ16 Certificate origin", m.rq16_cert_origin_distribution);
    table("RQ17 Certificate chain", m.rq17_bundle_vs_leaf);
    table("RQ18 Certificate/key storage", m.rq18_storage_distribution);

    out << "RQ19 Plaintext coexistence: " << percent(m.rq19_plaintext_coexistence.fraction) << " ("
        << m.rq19_plaintext_coexistence.coexisting << "/" << m.rq19_plaintext_coexistence.tls_files
        << " TLS files)\n\n";

    table("RQ20 Hostnames", m.rq20_hostname_distribution);
    out << "RQ20 non-production hostnames: " << percent(m.rq20_non_production) << "\n";
    return out.str();
}

std::map<std::string, std::string> metrics_to_csv(const CorpusMetrics& m) {
    std::map<std::string, std::string> out;
    auto csv_fractions = [](const std::map<std::string, Fraction>& rows, const char* key_name) {
        std::ostringstream csv;
        csv << key_name << ",count,denominator,fraction\n";
        for (const auto& [key, f] : rows) {
            csv << key << "," << f.numerator << "," << f.denominator << ",";
            if (f.defined()) csv << f.value();
            csv << "\n";
        }
        return csv.str();
    };

    out["rq1_protocol_adoption.csv"] = csv_fractions(m.rq1_protocol_adoption, "protocol");
    out["rq3_kex_categories.csv"] = csv_fractions(m.rq3_kex_categories, "category");

    {
        std::ostringstream csv;
        csv << "pair,contexts\n";
        for (const auto& [pair, count] : m.rq2_weak_token.top_cooccurring_pairs)
            csv << "\"" << pair << "\"," << count << "\n";
        out["rq2_cooccurring_pairs.csv"] = csv.str();
    }
    {
        std::ostringstream csv;
        csv << "preset,stratum,count,denominator,fraction\n";
        for (const auto& [preset, strata] : m.rq8_legacy_presets)
            for (const auto& [stratum, f] : strata) {
                csv << preset << "," << stratum << "," << f.numerator << "," << f.denominator << ",";
                if (f.defined()) csv << f.value();
                csv << "\n";
            }
        out["rq8_legacy_presets.csv"] = csv.str();
    }
    {
        std::ostringstream csv;
        csv << "field,files_multi_context,files_drifting,rate\n";
        for (const auto& [field, stat] : m.rq9_internal_drift) {
            csv << field << "," << stat.files_multi_context << "," << stat.files_drifting << ",";
            if (stat.rate.defined()) csv << stat.rate.value();
            csv << "\n";
        }
        out["rq9_internal_drift.csv"] = csv.str();
    }
    {
        std::ostringstream csv;
        csv << "curve,contexts\n";
        for (const auto& [curve, count] : m.rq13_curve_distribution)
            csv << curve << "," << count << "\n";
        out["rq13_curve_distribution.csv"] = csv.str();
    }
    {
        std::ostringstream csv;
        csv << "token_count,contexts\n";
        for (const auto& [length, count] : m.rq14_cipher_length_histogram)
            csv << length << "," << count << "\n";
        out["rq14_cipher_length_histogram.csv"] = csv.str();
    }
    out["rq15_session_cache.csv"] = csv_fractions(m.rq15_session_cache_distribution, "cache");
    out["rq16_cert_origin.csv"] = csv_fractions(m.rq16_cert_origin_distribution, "origin");
    out["rq17_bundle_vs_leaf.csv"] = csv_fractions(m.rq17_bundle_vs_leaf, "kind");
    out["rq18_storage.csv"] = csv_fractions(m.rq18_storage_distribution, "pattern");
    out["rq20_hostnames.csv"] = csv_fractions(m.rq20_hostname_distribution, "hostname_type");
    return out;
}

}  // namespace cryptoscope
