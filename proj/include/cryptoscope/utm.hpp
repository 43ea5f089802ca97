#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cryptoscope/cipher.hpp"
#include "cryptoscope/common.hpp"

namespace cryptoscope {

inline constexpr const char* kUtmVersion = "1";

enum class TlsVersion { SSLv3, TLSv1_0, TLSv1_1, TLSv1_2, TLSv1_3 };
enum class ClientAuth { none, optional, required };
enum class SessionCache { unset, off, builtin, shared };

std::string to_string(TlsVersion version);
std::optional<TlsVersion> tls_version_from_string(const std::string& name);
std::string to_string(ClientAuth mode);
std::string to_string(SessionCache cache);

/// Trace from a normalized field back to the configuration line it came
/// from. raw_value is byte-identical to the intermediate value.
struct Provenance {
    std::string native_directive;
    std::string raw_value;
    SourceLoc source;
    std::string mapping_rule_id;
};

/// Technology-agnostic description of one TLS server context, organized in
/// eight sections. Every populated field carries a Provenance record in
/// `derived_from`, keyed by the field's dotted path.
struct UnifiedTlsModel {
    struct Endpoint {
        std::optional<int> port;
        std::optional<std::string> hostname;
        std::optional<std::string> role;
    } endpoint;

    std::optional<std::set<TlsVersion>> protocols;

    struct Ciphers {
        std::vector<CipherToken> suite_tokens;
        bool suite_tokens_set = false;
        std::optional<bool> prefer_server_order;
        std::vector<std::string> ecdh_curves;
    } ciphers;

    struct Certificates {
        std::optional<std::string> cert_path;
        std::optional<std::string> key_path;
        std::optional<bool> ocsp_stapling;
    } certificates;

    struct Trust {
        std::vector<std::string> ca_paths;
        std::vector<std::string> crl_paths;
    } trust;

    struct Verification {
        std::optional<ClientAuth> client_auth;
        std::optional<int> verify_depth;
        std::optional<bool> strict_sni;
    } verification;

    struct Session {
        SessionCache cache = SessionCache::unset;
        std::optional<int> timeout_seconds;
        std::optional<bool> tickets;
        std::optional<bool> compression;
    } session;

    struct SecurityHeaders {
        bool hsts_present = false;
        std::optional<int> hsts_max_age;
        std::optional<bool> hsts_subdomains;
    } security_headers;

    std::map<std::string, std::vector<Provenance>> derived_from;

    void add_provenance(const std::string& field, Provenance provenance);
    const Provenance* provenance_of(const std::string& field) const;

    /// Section-wise equality ignoring provenance (cross-technology
    /// convergence checks).
    bool same_posture(const UnifiedTlsModel& other) const;
};

struct ValidationFinding {
    std::string code;
    std::string message;
};

/// Structural consistency findings: orphan-key, invalid-port,
/// empty-protocols, nonpositive-timeout. Never mutates the model.
std::vector<ValidationFinding> validate_utm(const UnifiedTlsModel& utm);

/// Dotted paths of every settable UTM field plus the `security_headers`
/// composite; mapping and policy loaders validate against this list.
const std::vector<std::string>& utm_field_paths();
bool is_utm_field(const std::string& dotted_path);

/// Fixed-order JSON serialization (sections in declaration order) so
/// reports are byte-stable.
nlohmann::ordered_json utm_to_json(const UnifiedTlsModel& utm);
UnifiedTlsModel utm_from_json(const nlohmann::json& doc);

}  // namespace cryptoscope
