#include "cryptoscope/policy.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

namespace cryptoscope {

std::string to_string(Requirement requirement) {
    switch (requirement) {
        case Requirement::must_include: return "must_include";
        case Requirement::must_exclude: return "must_exclude";
        case Requirement::must_equal: return "must_equal";
        case Requirement::must_be_set: return "must_be_set";
        case Requirement::must_be_unset: return "must_be_unset";
        case Requirement::min_value: return "min_value";
        case Requirement::all_tokens_satisfy: return "all_tokens_satisfy";
    }
    return "must_be_set";
}

std::string to_string(Severity severity) { return severity == Severity::fail ? "fail" : "warn"; }

std::string to_string(QuantumRisk risk) {
    switch (risk) {
        case QuantumRisk::resistant: return "resistant";
        case QuantumRisk::vulnerable_fs: return "vulnerable_fs";
        case QuantumRisk::vulnerable_no_fs: return "vulnerable_no_fs";
    }
    return "vulnerable_fs";
}

std::string to_string(ReportChange change) {
    switch (change) {
        case ReportChange::improved: return "improved";
        case ReportChange::regressed: return "regressed";
        case ReportChange::unchanged: return "unchanged";
        case ReportChange::added: return "added";
        case ReportChange::removed: return "removed";
    }
    return "unchanged";
}

const std::vector<std::string>& token_predicate_names() {
    static const std::vector<std::string> names = {"no_weak_flags", "aead_only",
                                                   "forward_secret_kex", "not_rsa_kex"};
    return names;
}

static std::optional<Requirement> requirement_from_string(const std::string& name) {
    if (name == "must_include") return Requirement::must_include;
    if (name == "must_exclude") return Requirement::must_exclude;
    if (name == "must_equal") return Requirement::must_equal;
    if (name == "must_be_set") return Requirement::must_be_set;
    if (name == "must_be_unset") return Requirement::must_be_unset;
    if (name == "min_value") return Requirement::min_value;
    if (name == "all_tokens_satisfy") return Requirement::all_tokens_satisfy;
    return std::nullopt;
}

Policy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read policy file " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("policy file " + path.string() + " is not valid JSON");

    Policy policy;
    policy.id = doc.value("id", "");
    if (policy.id.empty()) throw ConfigError(path.string() + ": policy needs an 'id'");
    policy.name = doc.value("name", policy.id);
    if (!doc.contains("rules") || !doc["rules"].is_array())
        throw ConfigError(path.string() + ": missing 'rules' array");

    std::set<std::string> seen;
    for (const auto& item : doc["rules"]) {
        PolicyRule rule;
        rule.id = item.value("id", "");
        if (rule.id.empty()) throw ConfigError(path.string() + ": rule without id");
        if (!seen.insert(rule.id).second)
            throw ConfigError(path.string() + ": duplicate rule id '" + rule.id + "'");

        rule.utm_field = item.value("utm_field", "");
        if (!is_utm_field(rule.utm_field))
            throw ConfigError(path.string() + ": rule '" + rule.id + "' targets unknown utm_field '" +
                              rule.utm_field + "'");

        const std::string req_name = item.value("requirement", "");
        auto requirement = requirement_from_string(req_name);
        if (!requirement)
            throw ConfigError(path.string() + ": rule '" + rule.id + "' has unknown requirement '" +
                              req_name + "'");
        rule.requirement = *requirement;

        if (item.contains("parameter")) {
            const auto& p = item["parameter"];
            rule.parameter = p.is_string() ? p.get<std::string>() : p.dump();
        }
        const bool needs_parameter = rule.requirement != Requirement::must_be_set &&
                                     rule.requirement != Requirement::must_be_unset;
        if (needs_parameter && rule.parameter.empty())
            throw ConfigError(path.string() + ": rule '" + rule.id + "' requires a parameter");
        if (rule.requirement == Requirement::min_value) {
            try {
                (void)std::stol(rule.parameter);
            } catch (const std::exception&) {
                throw ConfigError(path.string() + ": rule '" + rule.id +
                                  "' min_value parameter must be numeric");
            }
        }
        if (rule.requirement == Requirement::all_tokens_satisfy) {
            const auto& names = token_predicate_names();
            if (std::find(names.begin(), names.end(), rule.parameter) == names.end())
                throw ConfigError(path.string() + ": rule '" + rule.id + "' names unknown predicate '" +
                                  rule.parameter + "'");
        }

        const std::string severity = item.value("severity", "fail");
        if (severity == "warn")
            rule.severity = Severity::warn;
        else if (severity == "fail")
            rule.severity = Severity::fail;
        else
            throw ConfigError(path.string() + ": rule '" + rule.id + "' has unknown severity '" +
                              severity + "'");
        policy.rules.push_back(std::move(rule));
    }
    return policy;
}

// ── Field access for rule evaluation ───────────────────────────────────────

namespace {

struct FieldView {
    bool set = false;
    std::vector<std::string> values;   // membership universe for include/exclude
    std::optional<std::string> scalar; // for must_equal
    std::optional<long> number;        // for min_value
    std::string provenance_key;
};

std::string bool_str(bool value) { return value ? "true" : "false"; }

FieldView view_field(const UnifiedTlsModel& utm, const std::string& field) {
    FieldView view;
    view.provenance_key = field;
    auto scalar = [&](const std::string& value) {
        view.set = true;
        view.scalar = value;
        view.values = {value};
    };

    if (field == "protocols") {
        if (utm.protocols) {
            view.set = true;
            for (TlsVersion v : *utm.protocols) view.values.push_back(to_string(v));
            view.scalar = join(view.values, " ");
        }
    } else if (field == "ciphers.suite_tokens") {
        if (utm.ciphers.suite_tokens_set) {
            view.set = true;
            for (const CipherToken& token : utm.ciphers.suite_tokens)
                view.values.push_back(token.negated ? "!" + token.text : token.text);
            view.scalar = join(view.values, ":");
        }
    } else if (field == "ciphers.ecdh_curves") {
        if (!utm.ciphers.ecdh_curves.empty()) {
            view.set = true;
            view.values = utm.ciphers.ecdh_curves;
            view.scalar = join(view.values, ":");
        }
    } else if (field == "ciphers.prefer_server_order") {
        if (utm.ciphers.prefer_server_order) scalar(bool_str(*utm.ciphers.prefer_server_order));
    } else if (field == "endpoint.port") {
        if (utm.endpoint.port) {
            scalar(std::to_string(*utm.endpoint.port));
            view.number = *utm.endpoint.port;
        }
    } else if (field == "endpoint.hostname") {
        if (utm.endpoint.hostname) scalar(*utm.endpoint.hostname);
    } else if (field == "endpoint.role") {
        if (utm.endpoint.role) scalar(*utm.endpoint.role);
    } else if (field == "certificates.cert_path") {
        if (utm.certificates.cert_path) scalar(*utm.certificates.cert_path);
    } else if (field == "certificates.key_path") {
        if (utm.certificates.key_path) scalar(*utm.certificates.key_path);
    } else if (field == "certificates.ocsp_stapling") {
        if (utm.certificates.ocsp_stapling) scalar(bool_str(*utm.certificates.ocsp_stapling));
    } else if (field == "trust.ca_paths") {
        if (!utm.trust.ca_paths.empty()) {
            view.set = true;
            view.values = utm.trust.ca_paths;
        }
    } else if (field == "trust.crl_paths") {
        if (!utm.trust.crl_paths.empty()) {
            view.set = true;
            view.values = utm.trust.crl_paths;
        }
    } else if (field == "verification.client_auth") {
        if (utm.verification.client_auth) scalar(to_string(*utm.verification.client_auth));
    } else if (field == "verification.verify_depth") {
        if (utm.verification.verify_depth) {
            scalar(std::to_string(*utm.verification.verify_depth));
            view.number = *utm.verification.verify_depth;
        }
    } else if (field == "verification.strict_sni") {
        if (utm.verification.strict_sni) scalar(bool_str(*utm.verification.strict_sni));
    } else if (field == "session.cache") {
        if (utm.session.cache != SessionCache::unset) scalar(to_string(utm.session.cache));
    } else if (field == "session.timeout_seconds") {
        if (utm.session.timeout_seconds) {
            scalar(std::to_string(*utm.session.timeout_seconds));
            view.number = *utm.session.timeout_seconds;
        }
    } else if (field == "session.tickets") {
        if (utm.session.tickets) scalar(bool_str(*utm.session.tickets));
    } else if (field == "session.compression") {
        if (utm.session.compression) scalar(bool_str(*utm.session.compression));
    } else if (field == "security_headers" || field == "security_headers.hsts_present") {
        view.provenance_key = "security_headers";
        if (utm.security_headers.hsts_present) scalar(bool_str(true));
    } else if (field == "security_headers.hsts_max_age") {
        view.provenance_key = "security_headers";
        if (utm.security_headers.hsts_max_age) {
            scalar(std::to_string(*utm.security_headers.hsts_max_age));
            view.number = *utm.security_headers.hsts_max_age;
        }
    } else if (field == "security_headers.hsts_subdomains") {
        view.provenance_key = "security_headers";
        if (utm.security_headers.hsts_subdomains)
            scalar(bool_str(*utm.security_headers.hsts_subdomains));
    }
    return view;
}

bool token_satisfies(const CipherClassification& c, const std::string& predicate) {
    if (predicate == "no_weak_flags") return c.weak_flags.empty();
    if (predicate == "aead_only") return c.aead.value_or(false);
    if (predicate == "forward_secret_kex")
        return c.kex_category == KexCategory::ecdhe_dhe ||
               c.kex_category == KexCategory::tls13_suite ||
               c.kex_category == KexCategory::pqc_hybrid;
    if (predicate == "not_rsa_kex") return c.kex_category != KexCategory::rsa_kex;
    return false;
}

}  // namespace

PolicyReport evaluate(const UnifiedTlsModel& utm, const Policy& policy,
                      const std::string& context_id, const CipherTable& suites) {
    PolicyReport report;
    report.context_id = context_id;
    report.policy_id = policy.id;

    for (const PolicyRule& rule : policy.rules) {
        FieldView view = view_field(utm, rule.utm_field);
        auto add_finding = [&](const std::string& observed) {
            PolicyFinding finding;
            finding.rule_id = rule.id;
            finding.severity = rule.severity;
            finding.observed = observed;
            if (const Provenance* p = utm.provenance_of(view.provenance_key)) finding.provenance = *p;
            report.findings.push_back(std::move(finding));
        };

        switch (rule.requirement) {
            case Requirement::must_be_set:
                if (!view.set) add_finding("unset");
                break;

            case Requirement::must_be_unset:
                if (view.set) add_finding(view.scalar.value_or(join(view.values, " ")));
                break;

            case Requirement::must_include: {
                const bool present =
                    view.set && std::any_of(view.values.begin(), view.values.end(),
                                            [&](const std::string& v) { return v == rule.parameter; });
                if (!present) add_finding(view.set ? join(view.values, " ") : "unset");
                break;
            }

            case Requirement::must_exclude: {
                const bool present =
                    view.set && std::any_of(view.values.begin(), view.values.end(),
                                            [&](const std::string& v) { return v == rule.parameter; });
                if (present) add_finding(join(view.values, " "));
                break;
            }

            case Requirement::must_equal:
                if (!view.set)
                    add_finding("unset");
                else if (view.scalar.value_or("") != rule.parameter)
                    add_finding(view.scalar.value_or(""));
                break;

            case Requirement::min_value:
                if (!view.set || !view.number)
                    add_finding("unset");
                else if (*view.number < std::stol(rule.parameter))
                    add_finding(std::to_string(*view.number));
                break;

            case Requirement::all_tokens_satisfy: {
                if (!utm.ciphers.suite_tokens_set) break;  // vacuous
                std::vector<std::string> offenders;
                for (const CipherToken& token : utm.ciphers.suite_tokens) {
                    if (token.negated || token.kind != TokenKind::suite) continue;
                    CipherClassification c = classify_suite(token, suites);
                    if (!token_satisfies(c, rule.parameter)) offenders.push_back(token.text);
                }
                if (!offenders.empty()) add_finding(join(offenders, " "));
                break;
            }
        }
    }

    report.pass = std::none_of(report.findings.begin(), report.findings.end(),
                               [](const PolicyFinding& f) { return f.severity == Severity::fail; });
    return report;
}

// ── Quantum readiness ──────────────────────────────────────────────────────

QuantumAssessment quantum_readiness(const UnifiedTlsModel& utm, const CipherTable& suites,
                                    const CurveTable& curves) {
    QuantumAssessment assessment;
    const KexCategory category = classify_context_kex(utm, suites, curves);

    auto provenance_for = [&](const char* field) -> std::optional<Provenance> {
        if (const Provenance* p = utm.provenance_of(field)) return *p;
        return std::nullopt;
    };

    switch (category) {
        case KexCategory::pqc_hybrid: {
            assessment.risk_level = QuantumRisk::resistant;
            for (const std::string& curve : utm.ciphers.ecdh_curves)
                if (classify_curve(curve, curves) == CurveClass::pqc_hybrid)
                    assessment.findings.push_back({curve, "hybrid post-quantum key exchange group",
                                                   provenance_for("ciphers.ecdh_curves")});
            return assessment;
        }
        case KexCategory::rsa_kex: assessment.risk_level = QuantumRisk::vulnerable_no_fs; break;
        case KexCategory::ecdhe_dhe:
        case KexCategory::tls13_suite:
        case KexCategory::unknown: assessment.risk_level = QuantumRisk::vulnerable_fs; break;
    }

    bool any_suite_finding = false;
    for (const CipherToken& token : utm.ciphers.suite_tokens) {
        if (token.negated || token.kind != TokenKind::suite) continue;
        CipherClassification c = classify_suite(token, suites);
        if (c.kex_category == KexCategory::rsa_kex) {
            assessment.findings.push_back({token.text,
                                           "RSA key transport: no forward secrecy, quantum-vulnerable",
                                           provenance_for("ciphers.suite_tokens")});
            any_suite_finding = true;
        } else if (c.kex_category == KexCategory::ecdhe_dhe) {
            assessment.findings.push_back({token.text,
                                           "ephemeral " + c.components.kex +
                                               " key exchange: forward-secret but quantum-vulnerable",
                                           provenance_for("ciphers.suite_tokens")});
            any_suite_finding = true;
        }
    }
    if (!any_suite_finding && utm.protocols && utm.protocols->contains(TlsVersion::TLSv1_3)) {
        assessment.findings.push_back({"TLSv1.3",
                                       "default ephemeral ECDH groups: forward-secret but quantum-vulnerable",
                                       provenance_for("protocols")});
    } else if (!any_suite_finding && category == KexCategory::unknown) {
        assessment.findings.push_back(
            {"defaults", "no explicit key-exchange configuration; library defaults are classical",
             std::nullopt});
    }
    for (const std::string& curve : utm.ciphers.ecdh_curves) {
        const CurveClass cc = classify_curve(curve, curves);
        if (cc == CurveClass::classical_named)
            assessment.findings.push_back({curve, "classical named group, Shor-vulnerable",
                                           provenance_for("ciphers.ecdh_curves")});
    }
    return assessment;
}

// ── Diffing ────────────────────────────────────────────────────────────────

namespace {

std::set<std::string> fail_finding_keys(const PolicyReport& report) {
    std::set<std::string> keys;
    for (const PolicyFinding& f : report.findings)
        if (f.severity == Severity::fail) keys.insert(f.rule_id + "|" + f.observed);
    return keys;
}

}  // namespace

DiffSummary diff_reports(const std::vector<PolicyReport>& before,
                         const std::vector<PolicyReport>& after) {
    DiffSummary summary;
    std::map<std::pair<std::string, std::string>, const PolicyReport*> before_map, after_map;
    for (const PolicyReport& r : before) before_map[{r.context_id, r.policy_id}] = &r;
    for (const PolicyReport& r : after) after_map[{r.context_id, r.policy_id}] = &r;

    for (const auto& [key, b] : before_map) {
        auto it = after_map.find(key);
        if (it == after_map.end()) {
            summary.deltas.push_back({key.first, key.second, ReportChange::removed, "context or policy gone"});
            ++summary.removed;
            continue;
        }
        const PolicyReport* a = it->second;
        ReportDelta delta{key.first, key.second, ReportChange::unchanged, ""};
        if (b->pass && !a->pass) {
            delta.change = ReportChange::regressed;
            delta.detail = "pass -> fail";
        } else if (!b->pass && a->pass) {
            delta.change = ReportChange::improved;
            delta.detail = "fail -> pass";
        } else {
            const auto before_keys = fail_finding_keys(*b);
            const auto after_keys = fail_finding_keys(*a);
            std::vector<std::string> added_keys;
            std::set_difference(after_keys.begin(), after_keys.end(), before_keys.begin(),
                                before_keys.end(), std::back_inserter(added_keys));
            if (!added_keys.empty()) {
                delta.change = ReportChange::regressed;
                delta.detail = "new fail finding: " + join(added_keys, ", ");
            } else if (after_keys.size() < before_keys.size()) {
                delta.change = ReportChange::improved;
                delta.detail = "fail findings resolved";
            }
        }
        switch (delta.change) {
            case ReportChange::improved: ++summary.improved; break;
            case ReportChange::regressed: ++summary.regressed; break;
            default: ++summary.unchanged; break;
        }
        summary.deltas.push_back(std::move(delta));
    }
    for (const auto& [key, a] : after_map) {
        if (before_map.contains(key)) continue;
        summary.deltas.push_back({key.first, key.second, ReportChange::added,
                                  a->pass ? "new context: pass" : "new context: fail"});
        ++summary.added;
    }
    std::sort(summary.deltas.begin(), summary.deltas.end(), [](const ReportDelta& x, const ReportDelta& y) {
        return std::tie(x.context_id, x.policy_id) < std::tie(y.context_id, y.policy_id);
    });
    return summary;
}

}  // namespace cryptoscope
