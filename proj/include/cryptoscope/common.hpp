#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cryptoscope {

enum class Technology { nginx, apache, springboot, unknown };

std::string to_string(Technology tech);
std::optional<Technology> technology_from_string(const std::string& name);

/// Position of a directive name token inside a configuration file.
/// Lines and columns are 1-based.
struct SourceLoc {
    std::string file;
    int line = 0;
    int column = 0;

    bool operator==(const SourceLoc&) const = default;
};

struct Warning {
    std::string code;
    std::string message;
    SourceLoc where;
};

/// Non-fatal parse failure attached to the offending location.
struct ParseError {
    SourceLoc where;
    std::string message;
};

/// Fatal misconfiguration (bad mapping file, bad policy, bad manifest).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ── Calendar dates ─────────────────────────────────────────────────────────
// Proleptic Gregorian civil date. All date logic is supplied by the caller;
// the library never reads the wall clock.
struct CivilDate {
    int year = 0;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const CivilDate&) const = default;
};

/// Parses `YYYY-MM-DD`; a trailing time component (`T...`/` ...`) is ignored.
std::optional<CivilDate> parse_civil_date(const std::string& text);
std::string to_string(const CivilDate& date);

/// The same calendar day `months` earlier, clamped to the target month's
/// last day (2024-03-31 minus 1 month is 2024-02-29).
CivilDate months_before(const CivilDate& date, int months);

// ── Small string helpers ──────────────────────────────────────────────────
std::string trim(const std::string& text);
std::string to_lower(const std::string& text);
bool iequals(const std::string& a, const std::string& b);
std::vector<std::string> split_ws(const std::string& text);
std::vector<std::string> split_on(const std::string& text, const std::string& separators);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

/// True when the value defers to deploy-time interpolation ($VAR, ${VAR},
/// Spring-style placeholders included).
bool has_interpolation(const std::string& value);

}  // namespace cryptoscope
