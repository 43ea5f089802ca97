#include "cryptoscope/cipher.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cryptoscope {

// Embedded copies of the shipped data files (generated at build time from
// data/*.tsv so the library works without locating them on disk).
extern const char* kCipherSuitesTsv;
extern const char* kPresetsTsv;

std::string to_string(KexCategory category) {
    switch (category) {
        case KexCategory::ecdhe_dhe: return "ecdhe_dhe";
        case KexCategory::rsa_kex: return "rsa_kex";
        case KexCategory::pqc_hybrid: return "pqc_hybrid";
        case KexCategory::tls13_suite: return "tls13_suite";
        case KexCategory::unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(WeakFlag flag) {
    switch (flag) {
        case WeakFlag::RC4: return "RC4";
        case WeakFlag::DES: return "DES";
        case WeakFlag::TripleDES: return "3DES";
        case WeakFlag::EXPORT: return "EXPORT";
        case WeakFlag::NULL_CIPHER: return "NULL";
        case WeakFlag::MD5: return "MD5";
    }
    return "?";
}

std::string to_string(QuantumVerdict verdict) {
    switch (verdict) {
        case QuantumVerdict::vulnerable_no_fs: return "vulnerable_no_fs";
        case QuantumVerdict::vulnerable_fs: return "vulnerable_fs";
        case QuantumVerdict::resistant_hybrid: return "resistant_hybrid";
        case QuantumVerdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

static std::optional<WeakFlag> weak_flag_from_string(const std::string& name) {
    if (name == "RC4") return WeakFlag::RC4;
    if (name == "DES") return WeakFlag::DES;
    if (name == "3DES") return WeakFlag::TripleDES;
    if (name == "EXPORT") return WeakFlag::EXPORT;
    if (name == "NULL") return WeakFlag::NULL_CIPHER;
    if (name == "MD5") return WeakFlag::MD5;
    return std::nullopt;
}

// ── TSV parsing ────────────────────────────────────────────────────────────

namespace {

std::vector<std::vector<std::string>> parse_tsv(std::istream& in, size_t min_columns,
                                                const std::string& what) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        if (!header_seen) {  // first non-comment row is the header
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream cells_in(line);
        while (std::getline(cells_in, cell, '\t')) cells.push_back(trim(cell));
        if (cells.size() < min_columns)
            throw ConfigError(what + ":" + std::to_string(line_no) + ": expected at least " +
                              std::to_string(min_columns) + " columns");
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string dash_to_empty(const std::string& cell) { return cell == "-" ? "" : cell; }

}  // namespace

CipherTable CipherTable::load(const std::filesystem::path& tsv_path) {
    std::ifstream in(tsv_path);
    if (!in) throw ConfigError("cannot read cipher table " + tsv_path.string());
    CipherTable table;
    for (const auto& cells : parse_tsv(in, 7, tsv_path.filename().string())) {
        Row row;
        row.components.kex = dash_to_empty(cells[1]);
        row.components.auth = dash_to_empty(cells[2]);
        row.components.cipher = dash_to_empty(cells[3]);
        row.components.mode = dash_to_empty(cells[4]);
        row.components.mac_or_hash = dash_to_empty(cells[5]);
        row.aead = cells[6] == "yes" || cells[6] == "true" || cells[6] == "1";
        table.rows_[cells[0]] = row;
    }
    return table;
}

const CipherTable& CipherTable::builtin() {
    static const CipherTable table = [] {
        std::istringstream in(kCipherSuitesTsv);
        CipherTable built;
        for (const auto& cells : parse_tsv(in, 7, "builtin cipher table")) {
            Row row;
            row.components.kex = dash_to_empty(cells[1]);
            row.components.auth = dash_to_empty(cells[2]);
            row.components.cipher = dash_to_empty(cells[3]);
            row.components.mode = dash_to_empty(cells[4]);
            row.components.mac_or_hash = dash_to_empty(cells[5]);
            row.aead = cells[6] == "yes";
            built.rows_[cells[0]] = row;
        }
        return built;
    }();
    return table;
}

const SuiteComponents* CipherTable::find(const std::string& suite_name) const {
    auto it = rows_.find(suite_name);
    return it == rows_.end() ? nullptr : &it->second.components;
}

bool CipherTable::aead(const std::string& suite_name) const {
    auto it = rows_.find(suite_name);
    return it != rows_.end() && it->second.aead;
}

std::vector<std::string> CipherTable::names() const {
    std::vector<std::string> out;
    out.reserve(rows_.size());
    for (const auto& [name, row] : rows_) out.push_back(name);
    return out;
}

PresetTable PresetTable::load(const std::filesystem::path& tsv_path) {
    std::ifstream in(tsv_path);
    if (!in) throw ConfigError("cannot read preset table " + tsv_path.string());
    PresetTable table;
    for (const auto& cells : parse_tsv(in, 2, tsv_path.filename().string()))
        table.rows_[cells[0]] = weak_flag_from_string(cells[1]);
    return table;
}

const PresetTable& PresetTable::builtin() {
    static const PresetTable table = [] {
        std::istringstream in(kPresetsTsv);
        PresetTable built;
        for (const auto& cells : parse_tsv(in, 2, "builtin preset table"))
            built.rows_[cells[0]] = weak_flag_from_string(cells[1]);
        return built;
    }();
    return table;
}

bool PresetTable::contains(const std::string& name) const { return rows_.contains(name); }

std::optional<WeakFlag> PresetTable::weak_flag(const std::string& name) const {
    auto it = rows_.find(name);
    return it == rows_.end() ? std::nullopt : it->second;
}

// ── Tokenization ───────────────────────────────────────────────────────────

CipherToken parse_cipher_token(const std::string& piece) {
    CipherToken token;
    std::string text = trim(piece);
    if (!text.empty() && text[0] == '@') {
        token.kind = TokenKind::directive_modifier;
        token.text = text;
        return token;
    }
    // `!` permanently removes, `-` removes (re-addable): both count as
    // negation for weak-token analysis. `+` only reorders.
    if (!text.empty() && (text[0] == '!' || text[0] == '-')) {
        token.negated = true;
        text = text.substr(1);
    } else if (!text.empty() && text[0] == '+') {
        text = text.substr(1);
    }
    token.text = text;
    if (PresetTable::builtin().contains(text)) {
        token.kind = TokenKind::preset;
    } else if (text.find('-') != std::string::npos || text.starts_with("TLS_")) {
        token.kind = TokenKind::suite;
    } else {
        token.kind = TokenKind::preset;  // unknown bare macro
    }
    return token;
}

std::vector<CipherToken> tokenize_cipher_string(const std::string& raw) {
    std::vector<CipherToken> tokens;
    for (const std::string& piece : split_on(raw, ":, \t"))
        tokens.push_back(parse_cipher_token(piece));
    return tokens;
}

// ── Suite name grammar fallback ────────────────────────────────────────────

namespace {

bool parse_tls13_name(const std::string& name, SuiteComponents& components) {
    // TLS_<cipher tokens>_<hash>
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(name.substr(4));
    while (std::getline(in, piece, '_')) parts.push_back(piece);
    if (parts.size() < 3) return false;
    components.mac_or_hash = parts.back();
    parts.pop_back();
    // AES 128 GCM | AES 128 CCM | AES 128 CCM 8 | CHACHA20 POLY1305
    if (parts.size() >= 2 && parts.back() == "8") {
        parts.pop_back();
        if (parts.back() != "CCM") return false;
        parts.pop_back();
        components.mode = "CCM8";
    } else if (parts.back() == "GCM" || parts.back() == "CCM" || parts.back() == "POLY1305") {
        components.mode = parts.back();
        parts.pop_back();
    } else {
        return false;
    }
    components.cipher = join(parts, "");
    return !components.cipher.empty();
}

bool is_hash_token(const std::string& token) {
    return token == "MD5" || token == "SHA" || token == "SHA1" || token == "SHA256" ||
           token == "SHA384" || token == "SHA512";
}

// Classic OpenSSL suite grammar: [EXP-][kex[-auth]-]cipher[-mode]-hash,
// with RSA key transport implied when no kex prefix is present.
bool parse_classic_name(const std::string& name, SuiteComponents& components, bool& exported) {
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(name);
    while (std::getline(in, piece, '-')) parts.push_back(piece);
    if (parts.size() < 2) return false;
    for (const std::string& part : parts)
        if (part == "PSK" || part == "SRP" || part == "KRB5" || part == "GOST")
            return false;  // out-of-grammar key exchange families

    size_t i = 0;
    exported = false;
    if (parts[i] == "EXP" || parts[i] == "EXP1024") {
        exported = true;
        ++i;
        if (i >= parts.size()) return false;
    }

    if (parts[i] == "ECDHE" || parts[i] == "AECDH") {
        components.kex = "ECDHE";
        components.auth = parts[i] == "AECDH" ? "NULL" : "";
        ++i;
    } else if (parts[i] == "DHE" || parts[i] == "EDH" || parts[i] == "ADH") {
        components.kex = "DHE";
        components.auth = parts[i] == "ADH" ? "NULL" : "";
        ++i;
    } else if (parts[i] == "ECDH" || parts[i] == "DH") {
        components.kex = parts[i];  // static key exchange, no forward secrecy
        ++i;
    } else {
        components.kex = "RSA";
        components.auth = "RSA";
    }
    if (i >= parts.size()) return false;

    if (components.auth.empty() &&
        (parts[i] == "RSA" || parts[i] == "ECDSA" || parts[i] == "DSS")) {
        components.auth = parts[i];
        ++i;
    }
    if (i >= parts.size()) return false;

    // hash suffix (CHACHA20-POLY1305 suites imply SHA256)
    if (is_hash_token(parts.back())) {
        components.mac_or_hash = parts.back() == "SHA" ? "SHA1" : parts.back();
        parts.pop_back();
    }
    if (i >= parts.size()) return false;

    std::vector<std::string> enc(parts.begin() + static_cast<long>(i), parts.end());
    if (enc.empty()) return false;

    if (enc.back() == "GCM" || enc.back() == "CCM" || enc.back() == "CCM8" || enc.back() == "CBC") {
        components.mode = enc.back();
        enc.pop_back();
    } else if (enc.size() >= 2 && enc[enc.size() - 2] == "CCM" && enc.back() == "8") {
        components.mode = "CCM8";
        enc.pop_back();
        enc.pop_back();
    } else if (enc.back() == "POLY1305") {
        components.mode = "POLY1305";
        enc.pop_back();
        if (components.mac_or_hash.empty()) components.mac_or_hash = "SHA256";
    } else if (enc.size() == 2 && enc[0] == "DES" && enc[1] == "CBC3") {
        components.cipher = "3DES";
        components.mode = "CBC";
        return !components.mac_or_hash.empty();
    }
    if (enc.empty()) return false;
    components.cipher = join(enc, "");
    if (components.cipher == "3DES" || components.cipher == "DES3") components.cipher = "3DES";

    if (components.mode.empty()) {
        if (components.cipher == "RC4") components.mode = "STREAM";
        else if (components.cipher == "NULL") components.mode = "";
        else components.mode = "CBC";  // pre-TLS1.2 naming omits CBC
    }
    return true;
}

KexCategory kex_category_from_components(const std::string& name, const SuiteComponents& c) {
    if (to_lower(name).find("mlkem") != std::string::npos) return KexCategory::pqc_hybrid;
    if (name.starts_with("TLS_")) return KexCategory::tls13_suite;
    if (c.kex == "ECDHE" || c.kex == "DHE") return KexCategory::ecdhe_dhe;
    if (c.kex == "RSA" || c.kex == "ECDH" || c.kex == "DH") return KexCategory::rsa_kex;
    return KexCategory::unknown;
}

}  // namespace

CipherClassification classify_suite(const CipherToken& token, const CipherTable& table) {
    CipherClassification result;
    result.token = token;
    if (token.kind != TokenKind::suite) return result;

    const std::string& name = token.text;
    bool exported = name.starts_with("EXP-") || name.starts_with("EXP1024-") ||
                    name.find("EXPORT") != std::string::npos;

    if (const SuiteComponents* known = table.find(name)) {
        result.components = *known;
        result.aead = table.aead(name);
        result.from_table = true;
    } else if (name.starts_with("TLS_")) {
        SuiteComponents components;
        if (!parse_tls13_name(name, components)) return result;  // unknown / indeterminate
        result.components = components;
        result.aead = true;  // every TLS 1.3 suite is AEAD
    } else {
        SuiteComponents components;
        if (!parse_classic_name(name, components, exported)) return result;
        result.components = components;
        result.aead = components.mode == "GCM" || components.mode == "CCM" ||
                      components.mode == "CCM8" || components.mode == "POLY1305";
    }

    result.kex_category = kex_category_from_components(name, result.components);

    // Weak flags come from parsed components, never raw substrings.
    const SuiteComponents& c = result.components;
    if (c.cipher == "RC4") result.weak_flags.insert(WeakFlag::RC4);
    if (c.cipher == "DES") result.weak_flags.insert(WeakFlag::DES);
    if (c.cipher == "3DES") result.weak_flags.insert(WeakFlag::TripleDES);
    if (c.cipher == "NULL" || c.cipher.empty()) result.weak_flags.insert(WeakFlag::NULL_CIPHER);
    if (c.mac_or_hash == "MD5") result.weak_flags.insert(WeakFlag::MD5);
    if (exported) result.weak_flags.insert(WeakFlag::EXPORT);
    if (!result.weak_flags.empty()) result.aead = false;

    switch (result.kex_category) {
        case KexCategory::rsa_kex: result.quantum_verdict = QuantumVerdict::vulnerable_no_fs; break;
        case KexCategory::ecdhe_dhe: result.quantum_verdict = QuantumVerdict::vulnerable_fs; break;
        case KexCategory::pqc_hybrid: result.quantum_verdict = QuantumVerdict::resistant_hybrid; break;
        case KexCategory::tls13_suite:
        case KexCategory::unknown: result.quantum_verdict = QuantumVerdict::indeterminate; break;
    }
    return result;
}

std::set<std::string> detect_legacy_presets(const std::vector<CipherToken>& tokens) {
    std::set<std::string> found;
    for (const CipherToken& token : tokens) {
        if (token.kind != TokenKind::preset) continue;
        found.insert(token.negated ? "!" + token.text : token.text);
    }
    return found;
}

bool detect_mixed_strength(const std::vector<CipherClassification>& classifications) {
    bool any_aead = false;
    bool any_weak = false;
    for (const CipherClassification& c : classifications) {
        if (c.token.negated) continue;
        if (c.aead.value_or(false)) any_aead = true;
        if (!c.weak_flags.empty()) any_weak = true;
    }
    return any_aead && any_weak;
}

}  // namespace cryptoscope
