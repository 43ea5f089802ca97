#include "cryptoscope/common.hpp"

#include <algorithm>
#include <cctype>

namespace cryptoscope {

std::string to_string(Technology tech) {
    switch (tech) {
        case Technology::nginx: return "nginx";
        case Technology::apache: return "apache";
        case Technology::springboot: return "springboot";
        case Technology::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<Technology> technology_from_string(const std::string& name) {
    const std::string lowered = to_lower(trim(name));
    if (lowered == "nginx") return Technology::nginx;
    if (lowered == "apache" || lowered == "httpd") return Technology::apache;
    if (lowered == "springboot" || lowered == "spring-boot" || lowered == "spring")
        return Technology::springboot;
    if (lowered == "unknown") return Technology::unknown;
    return std::nullopt;
}

static bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

static int days_in_month(int year, int month) {
    static const int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return table[month - 1];
}

std::optional<CivilDate> parse_civil_date(const std::string& text) {
    std::string datepart = trim(text);
    if (auto cut = datepart.find_first_of("T "); cut != std::string::npos)
        datepart = datepart.substr(0, cut);
    if (datepart.size() != 10 || datepart[4] != '-' || datepart[7] != '-') return std::nullopt;
    for (size_t i = 0; i < datepart.size(); ++i) {
        if (i == 4 || i == 7) continue;
        if (!std::isdigit(static_cast<unsigned char>(datepart[i]))) return std::nullopt;
    }
    CivilDate date;
    date.year = std::stoi(datepart.substr(0, 4));
    date.month = std::stoi(datepart.substr(5, 2));
    date.day = std::stoi(datepart.substr(8, 2));
    if (date.month < 1 || date.month > 12) return std::nullopt;
    if (date.day < 1 || date.day > days_in_month(date.year, date.month)) return std::nullopt;
    return date;
}

std::string to_string(const CivilDate& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.year, date.month, date.day);
    return buf;
}

CivilDate months_before(const CivilDate& date, int months) {
    int absolute = date.year * 12 + (date.month - 1) - months;
    CivilDate out;
    out.year = absolute / 12;
    out.month = absolute % 12 + 1;
    if (absolute < 0 && absolute % 12 != 0) {  // round toward minus infinity
        out.year -= 1;
        out.month = absolute % 12 + 13;
    }
    out.day = std::min(date.day, days_in_month(out.year, out.month));
    return out;
}

std::string trim(const std::string& text) {
    size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::string to_lower(const std::string& text) {
    std::string out = text;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool iequals(const std::string& a, const std::string& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<std::string> split_on(const std::string& text, const std::string& separators) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (separators.find(c) != std::string::npos) {
            std::string piece = trim(current);
            if (!piece.empty()) out.push_back(std::move(piece));
            current.clear();
        } else {
            current += c;
        }
    }
    std::string piece = trim(current);
    if (!piece.empty()) out.push_back(std::move(piece));
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

bool has_interpolation(const std::string& value) {
    return value.find('$') != std::string::npos;
}

}  // namespace cryptoscope
