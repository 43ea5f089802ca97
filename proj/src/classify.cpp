#include "cryptoscope/classify.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cryptoscope {

extern const char* kCurvesTsv;

std::string to_string(CurveClass c) {
    switch (c) {
        case CurveClass::classical_named: return "classical_named";
        case CurveClass::pqc_hybrid: return "pqc_hybrid";
        case CurveClass::automatic: return "auto";
        case CurveClass::unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(KeyRefKind k) {
    switch (k) {
        case KeyRefKind::filesystem: return "filesystem";
        case KeyRefKind::pkcs11_uri: return "pkcs11_uri";
        case KeyRefKind::engine_ref: return "engine_ref";
        case KeyRefKind::env_var: return "env_var";
        case KeyRefKind::docker_secret: return "docker_secret";
        case KeyRefKind::relative: return "relative";
    }
    return "filesystem";
}

std::string to_string(CertOrigin o) {
    switch (o) {
        case CertOrigin::lets_encrypt_acme: return "lets_encrypt_acme";
        case CertOrigin::self_signed_indicator: return "self_signed_indicator";
        case CertOrigin::env_var: return "env_var";
        case CertOrigin::other: return "other";
    }
    return "other";
}

std::string to_string(CertChainKind k) {
    return k == CertChainKind::fullchain_bundle ? "fullchain_bundle" : "leaf_only";
}

std::string to_string(StorageKind k) {
    switch (k) {
        case StorageKind::docker_secrets: return "docker_secrets";
        case StorageKind::letsencrypt: return "letsencrypt";
        case StorageKind::nginx_dir: return "nginx_dir";
        case StorageKind::ssl_pki: return "ssl_pki";
        case StorageKind::opt_srv: return "opt_srv";
        case StorageKind::env_var: return "env_var";
        case StorageKind::relative: return "relative";
        case StorageKind::other_absolute: return "other_absolute";
    }
    return "other_absolute";
}

std::string to_string(HostnameClass h) {
    switch (h) {
        case HostnameClass::domain_like: return "domain_like";
        case HostnameClass::localhost: return "localhost";
        case HostnameClass::empty: return "empty";
        case HostnameClass::catch_all: return "catch_all";
        case HostnameClass::env_var: return "env_var";
        case HostnameClass::example_domain: return "example_domain";
        case HostnameClass::wildcard_only: return "wildcard_only";
        case HostnameClass::loopback_ip: return "loopback_ip";
        case HostnameClass::other: return "other";
    }
    return "other";
}

// ── Curves ─────────────────────────────────────────────────────────────────

namespace {

CurveClass curve_class_from_string(const std::string& text) {
    if (text == "classical_named") return CurveClass::classical_named;
    if (text == "pqc_hybrid") return CurveClass::pqc_hybrid;
    if (text == "auto") return CurveClass::automatic;
    return CurveClass::unknown;
}

std::map<std::string, CurveClass> parse_curves(std::istream& in, const std::string& what) {
    std::map<std::string, CurveClass> rows;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ConfigError(what + ":" + std::to_string(line_no) + ": expected two columns");
        rows[trim(line.substr(0, tab))] = curve_class_from_string(trim(line.substr(tab + 1)));
    }
    return rows;
}

}  // namespace

CurveTable CurveTable::load(const std::filesystem::path& tsv_path) {
    std::ifstream in(tsv_path);
    if (!in) throw ConfigError("cannot read curve table " + tsv_path.string());
    CurveTable table;
    table.rows_ = parse_curves(in, tsv_path.filename().string());
    return table;
}

const CurveTable& CurveTable::builtin() {
    static const CurveTable table = [] {
        std::istringstream in(kCurvesTsv);
        CurveTable built;
        built.rows_ = parse_curves(in, "builtin curve table");
        return built;
    }();
    return table;
}

CurveClass CurveTable::classify(const std::string& name) const {
    auto it = rows_.find(name);
    if (it != rows_.end()) return it->second;
    if (to_lower(name).find("mlkem") != std::string::npos) return CurveClass::pqc_hybrid;
    return CurveClass::unknown;
}

CurveClass classify_curve(const std::string& name, const CurveTable& table) {
    return table.classify(trim(name));
}

// ── Context-level key exchange ─────────────────────────────────────────────

KexCategory classify_context_kex(const UnifiedTlsModel& utm, const CipherTable& suites,
                                 const CurveTable& curves) {
    for (const std::string& curve : utm.ciphers.ecdh_curves)
        if (classify_curve(curve, curves) == CurveClass::pqc_hybrid) return KexCategory::pqc_hybrid;

    std::vector<CipherClassification> classifications;
    for (const CipherToken& token : utm.ciphers.suite_tokens) {
        if (token.negated || token.kind != TokenKind::suite) continue;
        classifications.push_back(classify_suite(token, suites));
    }

    const bool tls13_enabled =
        utm.protocols && utm.protocols->contains(TlsVersion::TLSv1_3);

    if (!classifications.empty()) {
        const bool all_rsa = std::all_of(
            classifications.begin(), classifications.end(),
            [](const CipherClassification& c) { return c.kex_category == KexCategory::rsa_kex; });
        if (all_rsa && !tls13_enabled) return KexCategory::rsa_kex;
        const bool any_fs = std::any_of(
            classifications.begin(), classifications.end(), [](const CipherClassification& c) {
                return c.kex_category == KexCategory::ecdhe_dhe ||
                       c.kex_category == KexCategory::tls13_suite;
            });
        if (any_fs || tls13_enabled) return KexCategory::ecdhe_dhe;
        if (all_rsa) return KexCategory::rsa_kex;
        return KexCategory::unknown;
    }

    if (tls13_enabled) return KexCategory::ecdhe_dhe;  // TLS 1.3 is always ephemeral
    return KexCategory::unknown;
}

// ── Key reference / HSM awareness ──────────────────────────────────────────

std::optional<KeyRefKind> detect_hsm(const UnifiedTlsModel& utm, bool engine_directive_present) {
    const std::optional<std::string>& key = utm.certificates.key_path;
    if (key && key->starts_with("pkcs11:")) return KeyRefKind::pkcs11_uri;
    if (engine_directive_present) return KeyRefKind::engine_ref;
    if (!key) return std::nullopt;
    if (has_interpolation(*key)) return KeyRefKind::env_var;
    if (key->starts_with("/run/secrets/")) return KeyRefKind::docker_secret;
    if (!key->starts_with("/")) return KeyRefKind::relative;
    return KeyRefKind::filesystem;
}

// ── Certificate paths ──────────────────────────────────────────────────────

CertOrigin classify_cert_origin(const std::string& cert_path) {
    if (has_interpolation(cert_path)) return CertOrigin::env_var;
    const std::string lowered = to_lower(cert_path);
    if (lowered.find("/etc/letsencrypt/") != std::string::npos ||
        lowered.find("acme") != std::string::npos)
        return CertOrigin::lets_encrypt_acme;
    const size_t slash = lowered.find_last_of('/');
    const std::string filename = slash == std::string::npos ? lowered : lowered.substr(slash + 1);
    if (filename.find("self") != std::string::npos ||
        filename.find("snakeoil") != std::string::npos)
        return CertOrigin::self_signed_indicator;
    return CertOrigin::other;
}

CertChainKind classify_cert_chain(const std::string& cert_path) {
    const std::string lowered = to_lower(cert_path);
    const size_t slash = lowered.find_last_of('/');
    const std::string filename = slash == std::string::npos ? lowered : lowered.substr(slash + 1);
    if (filename.find("fullchain") != std::string::npos ||
        filename.find("bundle") != std::string::npos || filename.find("chain") != std::string::npos)
        return CertChainKind::fullchain_bundle;
    return CertChainKind::leaf_only;
}

StorageKind classify_storage(const std::string& path) {
    if (path.starts_with("/run/secrets/")) return StorageKind::docker_secrets;
    if (path.starts_with("/etc/letsencrypt/")) return StorageKind::letsencrypt;
    if (path.starts_with("/etc/nginx/")) return StorageKind::nginx_dir;
    if (path.starts_with("/etc/ssl/") || path.starts_with("/etc/pki/")) return StorageKind::ssl_pki;
    if (path.starts_with("/opt/") || path.starts_with("/srv/")) return StorageKind::opt_srv;
    if (has_interpolation(path)) return StorageKind::env_var;
    if (!path.starts_with("/")) return StorageKind::relative;
    return StorageKind::other_absolute;
}

// ── Hostnames ──────────────────────────────────────────────────────────────

namespace {

bool plausible_tld(const std::string& label) {
    if (label.size() < 2 || label.size() > 24) return false;
    return std::all_of(label.begin(), label.end(),
                       [](unsigned char c) { return std::isalpha(c) != 0; });
}

bool registrable_under_example(const std::string& host) {
    for (const char* root : {"example.com", "example.net", "example.org"})
        if (host == root || host.ends_with(std::string(".") + root)) return true;
    for (const char* tld : {".test", ".invalid", ".local", ".localdomain", ".example"})
        if (host.ends_with(tld)) return true;
    return false;
}

}  // namespace

HostnameClass classify_hostname(const std::optional<std::string>& server_name) {
    if (!server_name) return HostnameClass::empty;
    const auto names = split_ws(*server_name);
    if (names.empty()) return HostnameClass::empty;
    const std::string& name = names.front();  // multi-name values: first name decides

    if (name == "_") return HostnameClass::catch_all;
    if (has_interpolation(name)) return HostnameClass::env_var;
    const std::string lowered = to_lower(name);
    if (lowered == "localhost" || lowered.ends_with(".localhost")) return HostnameClass::localhost;
    if (lowered == "127.0.0.1" || lowered == "::1" || lowered == "[::1]")
        return HostnameClass::loopback_ip;
    if (lowered == "*") return HostnameClass::wildcard_only;

    std::string host = lowered;
    if (host.starts_with("*.")) host = host.substr(2);
    if (registrable_under_example(host)) return HostnameClass::example_domain;

    const size_t dot = host.find_last_of('.');
    if (dot != std::string::npos && dot + 1 < host.size() && plausible_tld(host.substr(dot + 1)))
        return HostnameClass::domain_like;
    return HostnameClass::other;
}

}  // namespace cryptoscope
