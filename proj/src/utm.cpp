#include "cryptoscope/utm.hpp"

#include <algorithm>

namespace cryptoscope {

std::string to_string(TlsVersion version) {
    switch (version) {
        case TlsVersion::SSLv3: return "SSLv3";
        case TlsVersion::TLSv1_0: return "TLSv1.0";
        case TlsVersion::TLSv1_1: return "TLSv1.1";
        case TlsVersion::TLSv1_2: return "TLSv1.2";
        case TlsVersion::TLSv1_3: return "TLSv1.3";
    }
    return "TLSv1.2";
}

std::optional<TlsVersion> tls_version_from_string(const std::string& name) {
    const std::string t = trim(name);
    if (iequals(t, "SSLv3")) return TlsVersion::SSLv3;
    if (iequals(t, "TLSv1") || iequals(t, "TLSv1.0") || t == "TLS1" || t == "TLS1.0")
        return TlsVersion::TLSv1_0;
    if (iequals(t, "TLSv1.1") || t == "TLS1.1") return TlsVersion::TLSv1_1;
    if (iequals(t, "TLSv1.2") || t == "TLS1.2") return TlsVersion::TLSv1_2;
    if (iequals(t, "TLSv1.3") || t == "TLS1.3") return TlsVersion::TLSv1_3;
    return std::nullopt;
}

std::string to_string(ClientAuth mode) {
    switch (mode) {
        case ClientAuth::none: return "none";
        case ClientAuth::optional: return "optional";
        case ClientAuth::required: return "required";
    }
    return "none";
}

std::string to_string(SessionCache cache) {
    switch (cache) {
        case SessionCache::unset: return "unset";
        case SessionCache::off: return "off";
        case SessionCache::builtin: return "builtin";
        case SessionCache::shared: return "shared";
    }
    return "unset";
}

void UnifiedTlsModel::add_provenance(const std::string& field, Provenance provenance) {
    derived_from[field].push_back(std::move(provenance));
}

const Provenance* UnifiedTlsModel::provenance_of(const std::string& field) const {
    auto it = derived_from.find(field);
    if (it == derived_from.end() || it->second.empty()) return nullptr;
    return &it->second.front();
}

bool UnifiedTlsModel::same_posture(const UnifiedTlsModel& other) const {
    auto tokens_equal = [](const Ciphers& a, const Ciphers& b) {
        return a.suite_tokens == b.suite_tokens && a.suite_tokens_set == b.suite_tokens_set &&
               a.prefer_server_order == b.prefer_server_order && a.ecdh_curves == b.ecdh_curves;
    };
    return endpoint.port == other.endpoint.port && endpoint.hostname == other.endpoint.hostname &&
           endpoint.role == other.endpoint.role && protocols == other.protocols &&
           tokens_equal(ciphers, other.ciphers) &&
           certificates.cert_path == other.certificates.cert_path &&
           certificates.key_path == other.certificates.key_path &&
           certificates.ocsp_stapling == other.certificates.ocsp_stapling &&
           trust.ca_paths == other.trust.ca_paths && trust.crl_paths == other.trust.crl_paths &&
           verification.client_auth == other.verification.client_auth &&
           verification.verify_depth == other.verification.verify_depth &&
           verification.strict_sni == other.verification.strict_sni &&
           session.cache == other.session.cache &&
           session.timeout_seconds == other.session.timeout_seconds &&
           session.tickets == other.session.tickets &&
           session.compression == other.session.compression &&
           security_headers.hsts_present == other.security_headers.hsts_present &&
           security_headers.hsts_max_age == other.security_headers.hsts_max_age &&
           security_headers.hsts_subdomains == other.security_headers.hsts_subdomains;
}

std::vector<ValidationFinding> validate_utm(const UnifiedTlsModel& utm) {
    std::vector<ValidationFinding> findings;
    if (utm.endpoint.port && (*utm.endpoint.port < 1 || *utm.endpoint.port > 65535))
        findings.push_back({"invalid-port", "port " + std::to_string(*utm.endpoint.port) +
                                                " is outside [1, 65535]"});
    if (utm.certificates.key_path && !utm.certificates.cert_path)
        findings.push_back({"orphan-key", "key_path is set without a cert_path"});
    if (utm.protocols && utm.protocols->empty())
        findings.push_back({"empty-protocols",
                            "protocol directive present but no version survives interpretation"});
    if (utm.session.timeout_seconds && *utm.session.timeout_seconds <= 0)
        findings.push_back({"nonpositive-timeout", "session timeout must be positive"});
    return findings;
}

const std::vector<std::string>& utm_field_paths() {
    static const std::vector<std::string> paths = {
        "endpoint.port",
        "endpoint.hostname",
        "endpoint.role",
        "protocols",
        "ciphers.suite_tokens",
        "ciphers.prefer_server_order",
        "ciphers.ecdh_curves",
        "certificates.cert_path",
        "certificates.key_path",
        "certificates.ocsp_stapling",
        "trust.ca_paths",
        "trust.crl_paths",
        "verification.client_auth",
        "verification.verify_depth",
        "verification.strict_sni",
        "session.cache",
        "session.timeout_seconds",
        "session.tickets",
        "session.compression",
        "security_headers",  // composite: hsts_header_parse fills all three
        "security_headers.hsts_present",
        "security_headers.hsts_max_age",
        "security_headers.hsts_subdomains",
    };
    return paths;
}

bool is_utm_field(const std::string& dotted_path) {
    const auto& paths = utm_field_paths();
    return std::find(paths.begin(), paths.end(), dotted_path) != paths.end();
}

// ── JSON ───────────────────────────────────────────────────────────────────

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json provenance_json(const Provenance& p) {
    return ordered_json{{"native_directive", p.native_directive},
                        {"raw_value", p.raw_value},
                        {"source",
                         {{"file", p.source.file}, {"line", p.source.line}, {"column", p.source.column}}},
                        {"mapping_rule_id", p.mapping_rule_id}};
}

Provenance provenance_from_json(const nlohmann::json& doc) {
    Provenance p;
    p.native_directive = doc.value("native_directive", "");
    p.raw_value = doc.value("raw_value", "");
    if (doc.contains("source")) {
        p.source.file = doc["source"].value("file", "");
        p.source.line = doc["source"].value("line", 0);
        p.source.column = doc["source"].value("column", 0);
    }
    p.mapping_rule_id = doc.value("mapping_rule_id", "");
    return p;
}

template <typename T>
ordered_json opt_json(const std::optional<T>& value) {
    if (!value) return nullptr;
    return *value;
}

ordered_json token_json(const CipherToken& token) {
    const char* kind = token.kind == TokenKind::suite ? "suite"
                       : token.kind == TokenKind::preset ? "preset"
                                                         : "directive_modifier";
    return ordered_json{{"text", token.text}, {"negated", token.negated}, {"kind", kind}};
}

CipherToken token_from_json(const nlohmann::json& doc) {
    CipherToken token;
    token.text = doc.value("text", "");
    token.negated = doc.value("negated", false);
    const std::string kind = doc.value("kind", "suite");
    token.kind = kind == "preset" ? TokenKind::preset
                 : kind == "directive_modifier" ? TokenKind::directive_modifier
                                                : TokenKind::suite;
    return token;
}

}  // namespace

ordered_json utm_to_json(const UnifiedTlsModel& utm) {
    ordered_json doc;
    doc["utm_version"] = kUtmVersion;

    doc["endpoint"] = {{"port", opt_json(utm.endpoint.port)},
                       {"hostname", opt_json(utm.endpoint.hostname)},
                       {"role", opt_json(utm.endpoint.role)}};

    if (utm.protocols) {
        ordered_json versions = ordered_json::array();
        // fixed version order keeps serialization stable
        for (TlsVersion v : {TlsVersion::SSLv3, TlsVersion::TLSv1_0, TlsVersion::TLSv1_1,
                             TlsVersion::TLSv1_2, TlsVersion::TLSv1_3})
            if (utm.protocols->contains(v)) versions.push_back(to_string(v));
        doc["protocols"] = versions;
    } else {
        doc["protocols"] = nullptr;
    }

    ordered_json tokens = ordered_json::array();
    for (const CipherToken& token : utm.ciphers.suite_tokens) tokens.push_back(token_json(token));
    doc["ciphers"] = {{"suite_tokens", utm.ciphers.suite_tokens_set ? tokens : ordered_json(nullptr)},
                      {"prefer_server_order", opt_json(utm.ciphers.prefer_server_order)},
                      {"ecdh_curves", utm.ciphers.ecdh_curves}};

    doc["certificates"] = {{"cert_path", opt_json(utm.certificates.cert_path)},
                           {"key_path", opt_json(utm.certificates.key_path)},
                           {"ocsp_stapling", opt_json(utm.certificates.ocsp_stapling)}};

    doc["trust"] = {{"ca_paths", utm.trust.ca_paths}, {"crl_paths", utm.trust.crl_paths}};

    doc["verification"] = {
        {"client_auth",
         utm.verification.client_auth ? ordered_json(to_string(*utm.verification.client_auth))
                                      : ordered_json(nullptr)},
        {"verify_depth", opt_json(utm.verification.verify_depth)},
        {"strict_sni", opt_json(utm.verification.strict_sni)}};

    doc["session"] = {{"cache", to_string(utm.session.cache)},
                      {"timeout_seconds", opt_json(utm.session.timeout_seconds)},
                      {"tickets", opt_json(utm.session.tickets)},
                      {"compression", opt_json(utm.session.compression)}};

    doc["security_headers"] = {{"hsts_present", utm.security_headers.hsts_present},
                               {"hsts_max_age", opt_json(utm.security_headers.hsts_max_age)},
                               {"hsts_subdomains", opt_json(utm.security_headers.hsts_subdomains)}};

    ordered_json derived = ordered_json::object();
    for (const auto& [field, records] : utm.derived_from) {
        if (records.size() == 1) {
            derived[field] = provenance_json(records.front());
        } else {
            ordered_json list = ordered_json::array();
            for (const Provenance& p : records) list.push_back(provenance_json(p));
            derived[field] = list;
        }
    }
    doc["derived_from"] = derived;
    return doc;
}

UnifiedTlsModel utm_from_json(const nlohmann::json& doc) {
    UnifiedTlsModel utm;
    const auto& endpoint = doc.at("endpoint");
    if (!endpoint.at("port").is_null()) utm.endpoint.port = endpoint["port"].get<int>();
    if (!endpoint.at("hostname").is_null())
        utm.endpoint.hostname = endpoint["hostname"].get<std::string>();
    if (!endpoint.at("role").is_null()) utm.endpoint.role = endpoint["role"].get<std::string>();

    if (!doc.at("protocols").is_null()) {
        std::set<TlsVersion> versions;
        for (const auto& item : doc["protocols"])
            if (auto v = tls_version_from_string(item.get<std::string>())) versions.insert(*v);
        utm.protocols = versions;
    }

    const auto& ciphers = doc.at("ciphers");
    if (!ciphers.at("suite_tokens").is_null()) {
        utm.ciphers.suite_tokens_set = true;
        for (const auto& item : ciphers["suite_tokens"])
            utm.ciphers.suite_tokens.push_back(token_from_json(item));
    }
    if (!ciphers.at("prefer_server_order").is_null())
        utm.ciphers.prefer_server_order = ciphers["prefer_server_order"].get<bool>();
    for (const auto& item : ciphers.at("ecdh_curves"))
        utm.ciphers.ecdh_curves.push_back(item.get<std::string>());

    const auto& certificates = doc.at("certificates");
    if (!certificates.at("cert_path").is_null())
        utm.certificates.cert_path = certificates["cert_path"].get<std::string>();
    if (!certificates.at("key_path").is_null())
        utm.certificates.key_path = certificates["key_path"].get<std::string>();
    if (!certificates.at("ocsp_stapling").is_null())
        utm.certificates.ocsp_stapling = certificates["ocsp_stapling"].get<bool>();

    for (const auto& item : doc.at("trust").at("ca_paths"))
        utm.trust.ca_paths.push_back(item.get<std::string>());
    for (const auto& item : doc.at("trust").at("crl_paths"))
        utm.trust.crl_paths.push_back(item.get<std::string>());

    const auto& verification = doc.at("verification");
    if (!verification.at("client_auth").is_null()) {
        const std::string mode = verification["client_auth"].get<std::string>();
        utm.verification.client_auth = mode == "required" ? ClientAuth::required
                                       : mode == "optional" ? ClientAuth::optional
                                                            : ClientAuth::none;
    }
    if (!verification.at("verify_depth").is_null())
        utm.verification.verify_depth = verification["verify_depth"].get<int>();
    if (!verification.at("strict_sni").is_null())
        utm.verification.strict_sni = verification["strict_sni"].get<bool>();

    const auto& session = doc.at("session");
    const std::string cache = session.at("cache").get<std::string>();
    utm.session.cache = cache == "off" ? SessionCache::off
                        : cache == "builtin" ? SessionCache::builtin
                        : cache == "shared" ? SessionCache::shared
                                            : SessionCache::unset;
    if (!session.at("timeout_seconds").is_null())
        utm.session.timeout_seconds = session["timeout_seconds"].get<int>();
    if (!session.at("tickets").is_null()) utm.session.tickets = session["tickets"].get<bool>();
    if (!session.at("compression").is_null())
        utm.session.compression = session["compression"].get<bool>();

    const auto& headers = doc.at("security_headers");
    utm.security_headers.hsts_present = headers.at("hsts_present").get<bool>();
    if (!headers.at("hsts_max_age").is_null())
        utm.security_headers.hsts_max_age = headers["hsts_max_age"].get<int>();
    if (!headers.at("hsts_subdomains").is_null())
        utm.security_headers.hsts_subdomains = headers["hsts_subdomains"].get<bool>();

    if (doc.contains("derived_from")) {
        for (const auto& [field, value] : doc["derived_from"].items()) {
            if (value.is_array())
                for (const auto& item : value)
                    utm.derived_from[field].push_back(provenance_from_json(item));
            else
                utm.derived_from[field].push_back(provenance_from_json(value));
        }
    }
    return utm;
}

}  // namespace cryptoscope
