#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "msk/serialize.hpp"

namespace msk {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitHypothesis = 2;
inline constexpr int kExitSearch = 3;
inline constexpr int kExitUsage = 64;

inline int exitCodeFor(ErrorCode code) {
    switch (code) {
    case ErrorCode::HypothesisViolated:
    case ErrorCode::NotApplicable:
    case ErrorCode::NotCoprime: return kExitHypothesis;
    case ErrorCode::SearchExhausted:
    case ErrorCode::ThresholdUnreachable: return kExitSearch;
    case ErrorCode::ParseError:
    case ErrorCode::InvalidPoint:
    case ErrorCode::DuplicatePoint:
    case ErrorCode::SizeCapExceeded: return kExitUsage;
    default: return kExitCheckFailed;
    }
}

struct Check {
    std::string name;
    double bound = 0;
    double measured = 0;
    bool pass = false;
};

/// FNV-1a, 64 bit, as 16 hex digits.
inline std::string digest(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunReport {
    std::string command;
    Json inputs = Json::object();
    Json results = Json::object();
    std::vector<Check> checks;

    void addInput(const std::string& name, std::string_view content) { inputs[name] = digest(content); }
    void check(std::string name, double bound, double measured, bool pass) {
        checks.push_back({std::move(name), bound, measured, pass});
    }
    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    Json toJson() const {
        Json cs = Json::array();
        for (const auto& c : checks)
            cs.push_back({{"name", c.name}, {"bound", c.bound}, {"measured", c.measured}, {"pass", c.pass}});
        return {{"formatVersion", kFormatVersion},
                {"command", command},
                {"inputs", inputs},
                {"results", results},
                {"checks", std::move(cs)},
                {"pass", passed()},
                {"versions", {{"tool", kToolVersion}, {"format", kFormatVersion}}}};
    }
};

/// RFC 4180 field quoting.
inline std::string csvField(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csvTable(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csvField(fields[i]);
        }
        out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

/// Six significant digits for human-facing tables.
inline std::string humanDouble(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string checksTable(const RunReport& r) {
    std::ostringstream os;
    for (const auto& c : r.checks)
        os << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  measured=" << humanDouble(c.measured)
           << "  bound=" << humanDouble(c.bound) << '\n';
    return os.str();
}

} // namespace msk
