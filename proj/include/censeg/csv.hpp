#ifndef CENSEG_CSV_HPP
#define CENSEG_CSV_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "censeg/error.hpp"

namespace censeg {

// Plain comma splitting; the file formats used here never quote fields.
inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view field, std::size_t line_no, const char* what) {
    field = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(errc::parse, std::string("line ") + std::to_string(line_no) + ": malformed " + what + " '" +
                              std::string(field) + "'");
    return v;
}

inline long parse_long(std::string_view field, std::size_t line_no, const char* what) {
    field = trim(field);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(errc::parse, std::string("line ") + std::to_string(line_no) + ": malformed " + what + " '" +
                              std::string(field) + "'");
    return v;
}

}  // namespace censeg

#endif
