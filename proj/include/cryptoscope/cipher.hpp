#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cryptoscope/common.hpp"

namespace cryptoscope {

enum class TokenKind { suite, preset, directive_modifier };

/// One element of an OpenSSL-style cipher string. Negated tokens keep their
/// text without the leading `!`.
struct CipherToken {
    std::string text;
    bool negated = false;
    TokenKind kind = TokenKind::suite;

    bool operator==(const CipherToken&) const = default;
};

enum class KexCategory { ecdhe_dhe, rsa_kex, pqc_hybrid, tls13_suite, unknown };
enum class WeakFlag { RC4, DES, TripleDES, EXPORT, NULL_CIPHER, MD5 };
enum class QuantumVerdict { vulnerable_no_fs, vulnerable_fs, resistant_hybrid, indeterminate };

std::string to_string(KexCategory category);
std::string to_string(WeakFlag flag);
std::string to_string(QuantumVerdict verdict);

struct SuiteComponents {
    std::string kex;          // ECDHE, DHE, RSA, ... ; empty for TLS 1.3 names
    std::string auth;         // RSA, ECDSA, DSS, NULL, ...
    std::string cipher;       // AES128, CHACHA20, RC4, 3DES, NULL, ...
    std::string mode;         // GCM, CBC, CCM, CCM8, POLY1305, STREAM
    std::string mac_or_hash;  // SHA256, SHA1, MD5, ...

    bool operator==(const SuiteComponents&) const = default;
};

struct CipherClassification {
    CipherToken token;
    KexCategory kex_category = KexCategory::unknown;
    std::optional<bool> aead;
    std::set<WeakFlag> weak_flags;
    QuantumVerdict quantum_verdict = QuantumVerdict::indeterminate;
    SuiteComponents components;
    bool from_table = false;  // false = name-grammar fallback or unparseable
};

// ── Lookup tables ──────────────────────────────────────────────────────────

/// Per-suite metadata loaded from cipher_suites.tsv (columns: name, kex,
/// auth, cipher, mode, hash, aead). `-` marks an absent component.
class CipherTable {
public:
    static CipherTable load(const std::filesystem::path& tsv_path);
    /// Built-in copy of the shipped table, for table-less callers.
    static const CipherTable& builtin();

    const SuiteComponents* find(const std::string& suite_name) const;
    bool aead(const std::string& suite_name) const;
    std::vector<std::string> names() const;
    size_t size() const { return rows_.size(); }

private:
    struct Row {
        SuiteComponents components;
        bool aead = false;
    };
    std::map<std::string, Row> rows_;
};

/// Preset/macro names recognized in cipher strings (presets.tsv).
class PresetTable {
public:
    static PresetTable load(const std::filesystem::path& tsv_path);
    static const PresetTable& builtin();

    bool contains(const std::string& name) const;
    /// The weak algorithm a preset itself references (RC4 -> RC4, eNULL ->
    /// NULL, ...), if any.
    std::optional<WeakFlag> weak_flag(const std::string& name) const;

private:
    std::map<std::string, std::optional<WeakFlag>> rows_;
};

// ── Operations ─────────────────────────────────────────────────────────────

/// Splits on `:` (commas and whitespace accepted as separators too) and
/// classifies each piece as suite / preset / directive modifier, recording
/// `!` negation.
std::vector<CipherToken> tokenize_cipher_string(const std::string& raw);

CipherToken parse_cipher_token(const std::string& piece);

/// Components, key-exchange category, AEAD flag, weak flags and quantum
/// verdict for one suite token. Unknown names degrade to kex unknown /
/// verdict indeterminate. Weak flags match parsed components, never raw
/// substrings.
CipherClassification classify_suite(const CipherToken& token,
                                    const CipherTable& table = CipherTable::builtin());

/// Preset and negation tokens present in a cipher string, negation
/// preserved (`!MD5` stays `!MD5`). Modifiers like `@STRENGTH` are not
/// presets.
std::set<std::string> detect_legacy_presets(const std::vector<CipherToken>& tokens);

/// True when one context's non-negated suites mix at least one AEAD suite
/// with at least one weak-flagged suite.
bool detect_mixed_strength(const std::vector<CipherClassification>& classifications);

}  // namespace cryptoscope
