#include <algorithm>

#include "cryptoscope/intermediate.hpp"

namespace cryptoscope {

// The ten directive categories per technology: protocol versions, cipher
// suites, certificate/key paths, client authentication, trust store,
// session management, OCSP stapling, HSTS headers, cipher order preference,
// ECDH curve selection. Context-identity directives (listen, server names,
// SSLEngine, server.port, server.ssl.enabled) are handled structurally and
// intentionally absent here.

static const std::vector<std::string> kNginxAllowlist = {
    // protocols
    "ssl_protocols",
    // cipher suites
    "ssl_ciphers",
    // certificate / key material
    "ssl_certificate", "ssl_certificate_key", "ssl_dhparam", "ssl_engine",
    // client authentication
    "ssl_verify_client", "ssl_verify_depth",
    // trust store
    "ssl_client_certificate", "ssl_trusted_certificate", "ssl_crl",
    // session management
    "ssl_session_cache", "ssl_session_timeout", "ssl_session_tickets",
    // OCSP stapling
    "ssl_stapling", "ssl_stapling_verify", "ssl_stapling_file",
    // HSTS (kept only for Strict-Transport-Security values)
    "add_header",
    // cipher order preference
    "ssl_prefer_server_ciphers",
    // curve selection
    "ssl_ecdh_curve"};

static const std::vector<std::string> kApacheAllowlist = {
    "SSLProtocol",
    "SSLCipherSuite",
    "SSLCertificateFile", "SSLCertificateKeyFile", "SSLCertificateChainFile", "SSLCryptoDevice",
    "SSLOpenSSLConfCmd",
    "SSLVerifyClient", "SSLVerifyDepth",
    "SSLCACertificateFile", "SSLCACertificatePath", "SSLCARevocationFile", "SSLCARevocationPath",
    "SSLSessionCache", "SSLSessionCacheTimeout", "SSLSessionTickets",
    "SSLUseStapling", "SSLStaplingCache",
    "Header",
    "SSLHonorCipherOrder"};

static const std::vector<std::string> kSpringAllowlist = {
    "server.ssl.protocol", "server.ssl.protocols", "server.ssl.enabled-protocols",
    "server.ssl.ciphers",
    "server.ssl.certificate", "server.ssl.certificate-private-key", "server.ssl.key-store",
    "server.ssl.key-store-type", "server.ssl.key-alias",
    "server.ssl.client-auth",
    "server.ssl.trust-store", "server.ssl.trust-certificate", "server.ssl.trust-store-type"};

static const std::vector<std::string> kEmpty = {};

const std::vector<std::string>& allowlist_names(Technology tech) {
    switch (tech) {
        case Technology::nginx: return kNginxAllowlist;
        case Technology::apache: return kApacheAllowlist;
        case Technology::springboot: return kSpringAllowlist;
        case Technology::unknown: return kEmpty;
    }
    return kEmpty;
}

bool allowlisted(Technology tech, const std::string& directive, std::string* canonical) {
    const std::vector<std::string>& names = allowlist_names(tech);
    if (tech == Technology::apache) {
        auto it = std::find_if(names.begin(), names.end(),
                               [&](const std::string& name) { return iequals(name, directive); });
        if (it == names.end()) return false;
        if (canonical) *canonical = *it;
        return true;
    }
    auto it = std::find(names.begin(), names.end(), directive);
    if (it == names.end()) return false;
    if (canonical) *canonical = *it;
    return true;
}

bool is_additive_directive(Technology tech, const std::string& directive) {
    if (tech == Technology::nginx) return directive == "add_header" || directive == "listen";
    if (tech == Technology::apache)
        return iequals(directive, "Header") || iequals(directive, "SSLOpenSSLConfCmd");
    return false;
}

}  // namespace cryptoscope
