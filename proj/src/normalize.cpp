#include "cryptoscope/normalize.hpp"

#include <algorithm>
#include <charconv>

namespace cryptoscope {

namespace {

struct TransformResult {
    bool ok = false;
    std::string error;

    std::string text;
    std::vector<std::string> list;
    bool flag = false;
    long number = 0;
    std::set<TlsVersion> versions;
    struct {
        bool present = false;
        std::optional<int> max_age;
        std::optional<bool> subdomains;
    } hsts;
};

std::optional<bool> parse_bool_word(const std::string& raw) {
    const std::string lowered = to_lower(trim(raw));
    if (lowered == "on" || lowered == "true" || lowered == "yes" || lowered == "1") return true;
    if (lowered == "off" || lowered == "false" || lowered == "no" || lowered == "0") return false;
    return std::nullopt;
}

std::optional<long> parse_duration_seconds(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty()) return std::nullopt;
    std::string digits = text;
    long multiplier = 1;
    switch (digits.back()) {
        case 's': multiplier = 1; digits.pop_back(); break;
        case 'm': multiplier = 60; digits.pop_back(); break;
        case 'h': multiplier = 3600; digits.pop_back(); break;
        case 'd': multiplier = 86400; digits.pop_back(); break;
        default: break;
    }
    long value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
    return value * multiplier;
}

// `max-age=31536000; includeSubDomains; preload` (a leading header-name
// argument from add_header/Header has already been stripped).
TransformResult parse_hsts_value(const std::string& raw) {
    TransformResult result;
    result.hsts.present = true;
    bool max_age_seen = false;
    for (const std::string& part : split_on(raw, ";")) {
        const std::string lowered = to_lower(trim(part));
        if (lowered.starts_with("max-age")) {
            const size_t eq = lowered.find('=');
            if (eq == std::string::npos) {
                result.error = "max-age without value";
                return result;
            }
            const std::string number = trim(lowered.substr(eq + 1));
            long value = 0;
            auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
            if (ec != std::errc() || ptr != number.data() + number.size()) {
                result.error = "non-numeric max-age '" + number + "'";
                return result;
            }
            result.hsts.max_age = static_cast<int>(value);
            max_age_seen = true;
        } else if (lowered == "includesubdomains") {
            result.hsts.subdomains = true;
        }
    }
    if (max_age_seen && !result.hsts.subdomains) result.hsts.subdomains = false;
    result.ok = true;
    return result;
}

std::set<TlsVersion> protocol_universe(bool legacy) {
    // Modern `all` excludes SSLv3; legacy mode includes it.
    std::set<TlsVersion> all = {TlsVersion::TLSv1_0, TlsVersion::TLSv1_1, TlsVersion::TLSv1_2,
                                TlsVersion::TLSv1_3};
    if (legacy) all.insert(TlsVersion::SSLv3);
    return all;
}

TransformResult apply_transform(const MappingRule& rule, const std::string& raw,
                                const MappingSpec& spec) {
    TransformResult result;
    switch (rule.transform) {
        case Transform::identity:
            result.text = raw;
            result.ok = true;
            return result;

        case Transform::split_whitespace:
            result.list = split_ws(raw);
            result.ok = true;
            return result;

        case Transform::split_colon:
            result.list = split_on(raw, ":,");
            result.ok = true;
            return result;

        case Transform::protocol_set: {
            for (const std::string& piece : split_on(raw, ", \t")) {
                auto version = tls_version_from_string(piece);
                if (!version) {
                    result.error = "unknown protocol token '" + piece + "'";
                    return result;
                }
                result.versions.insert(*version);
            }
            result.ok = true;
            return result;
        }

        case Transform::apache_protocol_algebra: {
            std::set<TlsVersion> enabled;
            for (const std::string& piece : split_ws(raw)) {
                bool add = true;
                std::string word = piece;
                if (!word.empty() && (word[0] == '+' || word[0] == '-')) {
                    add = word[0] == '+';
                    word = word.substr(1);
                }
                if (iequals(word, "all")) {
                    const auto universe = protocol_universe(spec.legacy_protocol_universe);
                    if (add)
                        enabled.insert(universe.begin(), universe.end());
                    else
                        enabled.clear();
                    continue;
                }
                auto version = tls_version_from_string(word);
                if (!version) {
                    result.error = "unknown protocol token '" + word + "'";
                    return result;
                }
                if (add)
                    enabled.insert(*version);
                else
                    enabled.erase(*version);
            }
            result.versions = std::move(enabled);
            result.ok = true;
            return result;
        }

        case Transform::boolean: {
            auto value = parse_bool_word(raw);
            if (!value) {
                result.error = "not a boolean: '" + raw + "'";
                return result;
            }
            result.flag = *value;
            result.ok = true;
            return result;
        }

        case Transform::duration: {
            auto seconds = parse_duration_seconds(raw);
            if (!seconds) {
                result.error = "not a duration: '" + raw + "'";
                return result;
            }
            result.number = *seconds;
            result.ok = true;
            return result;
        }

        case Transform::hsts_header_parse:
            return parse_hsts_value(raw);
    }
    result.error = "unhandled transform";
    return result;
}

// The lowercased first [:whitespace]-delimited token, used as value_map key
// (turns `shared:SSL:10m` into `shared`).
std::string value_map_key(const std::string& raw) {
    const std::string trimmed = trim(raw);
    const size_t cut = trimmed.find_first_of(": \t");
    return to_lower(cut == std::string::npos ? trimmed : trimmed.substr(0, cut));
}

struct FieldSetter {
    UnifiedTlsModel& utm;
    std::vector<Warning>& findings;
    const MappingRule& rule;
    const Provenance& provenance;
    const MappingSpec& spec;

    void fail(const std::string& why) {
        findings.push_back({"transform-failed",
                            rule.rule_id + ": " + why + " (field left unset)", provenance.source});
    }

    bool set(const TransformResult& value) {
        const std::string& field = rule.utm_field;
        bool list_append = false;

        if (field == "endpoint.hostname") {
            utm.endpoint.hostname = value.text;
        } else if (field == "endpoint.role") {
            utm.endpoint.role = value.text;
        } else if (field == "endpoint.port") {
            auto port = parse_duration_seconds(value.text);
            if (!port) {
                fail("not a port number: '" + value.text + "'");
                return false;
            }
            utm.endpoint.port = static_cast<int>(*port);
        } else if (field == "protocols") {
            utm.protocols = value.versions;
        } else if (field == "ciphers.suite_tokens") {
            utm.ciphers.suite_tokens.clear();
            for (const std::string& piece : value.list)
                utm.ciphers.suite_tokens.push_back(parse_cipher_token(piece));
            utm.ciphers.suite_tokens_set = true;
        } else if (field == "ciphers.prefer_server_order") {
            utm.ciphers.prefer_server_order = value.flag;
        } else if (field == "ciphers.ecdh_curves") {
            utm.ciphers.ecdh_curves = value.list;
        } else if (field == "certificates.cert_path") {
            utm.certificates.cert_path = value.text;
        } else if (field == "certificates.key_path") {
            utm.certificates.key_path = value.text;
        } else if (field == "certificates.ocsp_stapling") {
            utm.certificates.ocsp_stapling = value.flag;
        } else if (field == "trust.ca_paths") {
            utm.trust.ca_paths.push_back(value.text);
            list_append = true;
        } else if (field == "trust.crl_paths") {
            utm.trust.crl_paths.push_back(value.text);
            list_append = true;
        } else if (field == "verification.client_auth") {
            const std::string mode = to_lower(value.text);
            if (mode == "required")
                utm.verification.client_auth = ClientAuth::required;
            else if (mode == "optional")
                utm.verification.client_auth = ClientAuth::optional;
            else if (mode == "none")
                utm.verification.client_auth = ClientAuth::none;
            else {
                fail("unknown client_auth mode '" + value.text + "'");
                return false;
            }
        } else if (field == "verification.verify_depth") {
            utm.verification.verify_depth = static_cast<int>(value.number);
        } else if (field == "verification.strict_sni") {
            utm.verification.strict_sni = value.flag;
        } else if (field == "session.cache") {
            const std::string mode = to_lower(value.text);
            if (mode == "shared")
                utm.session.cache = SessionCache::shared;
            else if (mode == "builtin")
                utm.session.cache = SessionCache::builtin;
            else if (mode == "off" || mode == "none")
                utm.session.cache = SessionCache::off;
            else {
                fail("unknown session cache kind '" + value.text + "'");
                return false;
            }
        } else if (field == "session.timeout_seconds") {
            utm.session.timeout_seconds = static_cast<int>(value.number);
        } else if (field == "session.tickets") {
            utm.session.tickets = value.flag;
        } else if (field == "session.compression") {
            utm.session.compression = value.flag;
        } else if (field == "security_headers") {
            utm.security_headers.hsts_present = value.hsts.present;
            utm.security_headers.hsts_max_age = value.hsts.max_age;
            utm.security_headers.hsts_subdomains = value.hsts.subdomains;
        } else if (field == "security_headers.hsts_present") {
            utm.security_headers.hsts_present = value.flag;
        } else if (field == "security_headers.hsts_max_age") {
            utm.security_headers.hsts_max_age = static_cast<int>(value.number);
        } else if (field == "security_headers.hsts_subdomains") {
            utm.security_headers.hsts_subdomains = value.flag;
        } else {
            fail("unmapped utm_field '" + field + "'");
            return false;
        }

        if (!list_append) utm.derived_from.erase(field);
        utm.add_provenance(field, provenance);
        return true;
    }
};

std::optional<int> parse_port_from_listen(const std::string& raw, Technology tech) {
    auto args = split_ws(raw);
    if (args.empty()) return std::nullopt;
    std::string address = args[0];
    if (tech == Technology::springboot) address = trim(raw);
    if (address.starts_with("unix:")) return std::nullopt;

    // addr:port, [::]:port, *:port, or a bare port
    std::string port_text = address;
    const size_t bracket = address.rfind(']');
    const size_t colon = address.find_last_of(':');
    if (colon != std::string::npos && (bracket == std::string::npos || colon > bracket))
        port_text = address.substr(colon + 1);
    if (port_text.empty() || port_text == "*") return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size()) return std::nullopt;
    return value;
}

bool endpoint_is_tls(const StructuralValue& endpoint, const IntermediateConfig& config) {
    if (config.technology != Technology::nginx) return config.tls_enabled;
    auto args = split_ws(endpoint.raw_value);
    if (std::find(args.begin(), args.end(), "ssl") != args.end()) return true;
    // legacy `ssl on;` enables TLS on every listen endpoint of the context
    return config.tls_enabled &&
           std::none_of(config.endpoints.begin(), config.endpoints.end(), [](const StructuralValue& e) {
               auto a = split_ws(e.raw_value);
               return std::find(a.begin(), a.end(), "ssl") != a.end();
           });
}

}  // namespace

NormalizedContext normalize(const IntermediateConfig& config, const MappingSpec& spec) {
    NormalizedContext out;
    UnifiedTlsModel base;

    if (spec.role_constant) base.endpoint.role = spec.role_constant;

    if (config.hostname) {
        base.endpoint.hostname = config.hostname->raw_value;
        base.add_provenance("endpoint.hostname",
                            {config.hostname->native_directive, config.hostname->raw_value,
                             config.hostname->source, "structural.hostname"});
    }

    for (const auto& [native, effective] : config.directives) {
        for (const DirectiveOccurrence& occurrence : effective.occurrences) {
            auto args = split_ws(occurrence.raw_value);

            const MappingRule* rule = spec.find_rule(native, args);
            if (!rule) {
                out.findings.push_back({"unmapped-directive",
                                        "allowlisted directive '" + native + "' has no mapping rule",
                                        occurrence.source});
                continue;
            }

            // arg_filter discriminates multi-purpose directives; everything
            // after the matched keyword is the value to transform.
            std::string effective_raw = occurrence.raw_value;
            if (rule->arg_filter) {
                const size_t name_pos = to_lower(effective_raw).find(to_lower(*rule->arg_filter));
                if (name_pos != std::string::npos)
                    effective_raw = trim(effective_raw.substr(name_pos + rule->arg_filter->size()));
            }

            Provenance provenance{native, occurrence.raw_value, occurrence.source, rule->rule_id};
            TransformResult value = apply_transform(*rule, effective_raw, spec);
            if (!value.ok) {
                out.findings.push_back(
                    {"transform-failed", rule->rule_id + ": " + value.error, occurrence.source});
                continue;
            }

            if (!rule->value_map.empty()) {
                auto it = rule->value_map.find(value_map_key(value.text));
                if (it == rule->value_map.end()) {
                    out.findings.push_back({"unknown-value",
                                            rule->rule_id + ": value '" + value.text +
                                                "' not in value map (field left unset)",
                                            occurrence.source});
                    continue;
                }
                value.text = it->second;
            }

            FieldSetter setter{base, out.findings, *rule, provenance, spec};
            setter.set(value);
        }
    }

    // Endpoint fan-out: one model per TLS listen endpoint; contexts without
    // any TLS endpoint keep a single model (port unset or from the only
    // declaration).
    std::vector<const StructuralValue*> tls_endpoints;
    for (const StructuralValue& endpoint : config.endpoints)
        if (endpoint_is_tls(endpoint, config)) tls_endpoints.push_back(&endpoint);
    if (tls_endpoints.empty() && !config.endpoints.empty() && !config.tls_enabled)
        tls_endpoints.push_back(&config.endpoints.front());

    if (tls_endpoints.empty()) {
        out.models.push_back(std::move(base));
        return out;
    }

    for (const StructuralValue* endpoint : tls_endpoints) {
        UnifiedTlsModel model = base;
        if (auto port = parse_port_from_listen(endpoint->raw_value, config.technology)) {
            model.endpoint.port = port;
            model.add_provenance("endpoint.port",
                                 {endpoint->native_directive, endpoint->raw_value, endpoint->source,
                                  "structural.endpoint"});
        }
        out.models.push_back(std::move(model));
    }
    return out;
}

}  // namespace cryptoscope
