#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cryptoscope/cipher.hpp"
#include "cryptoscope/utm.hpp"

namespace cryptoscope {

enum class CurveClass { classical_named, pqc_hybrid, automatic, unknown };
enum class KeyRefKind { filesystem, pkcs11_uri, engine_ref, env_var, docker_secret, relative };
enum class CertOrigin { lets_encrypt_acme, self_signed_indicator, env_var, other };
enum class CertChainKind { fullchain_bundle, leaf_only };
enum class StorageKind {
    docker_secrets,
    letsencrypt,
    nginx_dir,
    ssl_pki,
    opt_srv,
    env_var,
    relative,
    other_absolute
};
enum class HostnameClass {
    domain_like,
    localhost,
    empty,
    catch_all,
    env_var,
    example_domain,
    wildcard_only,
    loopback_ip,
    other
};

std::string to_string(CurveClass c);
std::string to_string(KeyRefKind k);
std::string to_string(CertOrigin o);
std::string to_string(CertChainKind k);
std::string to_string(StorageKind k);
std::string to_string(HostnameClass h);

/// Named-group table from curves.tsv; ML-KEM-bearing names class as hybrid
/// even when absent from the table.
class CurveTable {
public:
    static CurveTable load(const std::filesystem::path& tsv_path);
    static const CurveTable& builtin();

    CurveClass classify(const std::string& name) const;

private:
    std::map<std::string, CurveClass> rows_;
};

CurveClass classify_curve(const std::string& name,
                          const CurveTable& table = CurveTable::builtin());

/// Context-level key-exchange category. Precedence: hybrid curve >
/// forward-secret suites / TLS 1.3 > RSA-only suite list > unknown.
KexCategory classify_context_kex(const UnifiedTlsModel& utm,
                                 const CipherTable& suites = CipherTable::builtin(),
                                 const CurveTable& curves = CurveTable::builtin());

/// Key storage kind behind a context: pkcs11: URIs and engine directives
/// mark HSM backing; otherwise the key path's storage class. nullopt when
/// the context references no key at all.
std::optional<KeyRefKind> detect_hsm(const UnifiedTlsModel& utm, bool engine_directive_present);

CertOrigin classify_cert_origin(const std::string& cert_path);
CertChainKind classify_cert_chain(const std::string& cert_path);
StorageKind classify_storage(const std::string& path);

/// First-match hostname bucket (rule order makes the categories a
/// partition). Multi-name values are classified by their first name.
HostnameClass classify_hostname(const std::optional<std::string>& server_name);

}  // namespace cryptoscope
