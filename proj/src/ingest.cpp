#include "censeg/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "censeg/csv.hpp"
#include "censeg/error.hpp"

namespace censeg {

Day parse_date(std::string_view s) {
    s = trim(s);
    // truncate an optional time part
    for (const char sep : {'T', ' '}) {
        if (const auto pos = s.find(sep); pos != std::string_view::npos) {
            s = s.substr(0, pos);
            break;
        }
    }
    int y = 0;
    unsigned m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        std::sscanf(std::string(s).c_str(), "%d-%u-%u", &y, &m, &d) != 3)
        fail(errc::parse, "malformed date '" + std::string(s) + "' (expected YYYY-MM-DD)");
    if (m < 1 || m > 12 || d < 1 || d > 31) fail(errc::parse, "date out of range '" + std::string(s) + "'");
    const Day day = days_from_civil(y, m, d);
    // round-trip check rejects impossible days such as Feb 30
    int yy;
    unsigned mm, dd;
    civil_from_days(day, yy, mm, dd);
    if (yy != y || mm != m || dd != d) fail(errc::parse, "invalid calendar date '" + std::string(s) + "'");
    return day;
}

std::string format_date(Day d) {
    int y;
    unsigned m, dd;
    civil_from_days(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, dd);
    return buf;
}

std::vector<Measurement> parse_measurements(std::istream& in) {
    std::vector<Measurement> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (line_no == 1) {
            if (sv != "station_id,date,loq,value")
                fail(errc::parse, "line 1: expected header 'station_id,date,loq,value'");
            continue;
        }
        const auto fields = split_csv(sv);
        if (fields.size() != 4)
            fail(errc::parse, "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
        Measurement m;
        m.station_id = std::string(trim(fields[0]));
        if (m.station_id.empty()) fail(errc::parse, "line " + std::to_string(line_no) + ": empty station_id");
        try {
            m.day = parse_date(fields[1]);
        } catch (const error& e) {
            fail(errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
        m.loq = parse_double(fields[2], line_no, "loq");
        if (!(m.loq > 0.0)) fail(errc::invalid, "line " + std::to_string(line_no) + ": loq must be > 0");
        if (!trim(fields[3]).empty()) {
            const double v = parse_double(fields[3], line_no, "value");
            if (v < m.loq)
                fail(errc::invalid,
                     "line " + std::to_string(line_no) + ": quantified value below its own loq");
            m.value = v;
        }
        out.push_back(std::move(m));
    }
    return out;
}

namespace {

std::vector<std::string_view> split_on(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_mapped_double(std::string_view field, bool decimal_comma, std::size_t line_no,
                           const char* what) {
    if (!decimal_comma) return parse_double(field, line_no, what);
    std::string fixed(trim(field));
    std::replace(fixed.begin(), fixed.end(), ',', '.');
    return parse_double(fixed, line_no, what);
}

}  // namespace

std::vector<Measurement> parse_measurements_mapped(std::istream& in, const ColumnMapping& map) {
    if (!map.qualifier_col.empty() && map.censored_code.empty())
        fail(errc::invalid, "column mapping: qualifier column given without a censored code");
    std::vector<Measurement> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t i_station = 0, i_date = 0, i_loq = 0, i_value = 0, i_qual = 0;
    bool has_qual = !map.qualifier_col.empty();
    std::size_t n_cols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto fields = split_on(sv, map.separator);
        if (line_no == 1) {
            n_cols = fields.size();
            const auto locate = [&](const std::string& name) {
                for (std::size_t i = 0; i < fields.size(); ++i)
                    if (trim(fields[i]) == name) return i;
                fail(errc::parse, "header has no column '" + name + "'");
            };
            i_station = locate(map.station_col);
            i_date = locate(map.date_col);
            i_loq = locate(map.loq_col);
            i_value = locate(map.value_col);
            if (has_qual) i_qual = locate(map.qualifier_col);
            continue;
        }
        if (fields.size() != n_cols)
            fail(errc::parse, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(n_cols) + " fields, got " +
                                  std::to_string(fields.size()));
        Measurement m;
        m.station_id = std::string(trim(fields[i_station]));
        if (m.station_id.empty())
            fail(errc::parse, "line " + std::to_string(line_no) + ": empty station id");
        try {
            m.day = parse_date(fields[i_date]);
        } catch (const error& e) {
            fail(errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
        m.loq = parse_mapped_double(fields[i_loq], map.decimal_comma, line_no, "loq");
        if (!(m.loq > 0.0)) fail(errc::invalid, "line " + std::to_string(line_no) + ": loq must be > 0");
        const bool censored = has_qual ? trim(fields[i_qual]) == map.censored_code
                                       : trim(fields[i_value]).empty();
        if (!censored) {
            const double v = parse_mapped_double(fields[i_value], map.decimal_comma, line_no, "value");
            if (v < m.loq)
                fail(errc::invalid,
                     "line " + std::to_string(line_no) + ": quantified value below its own loq");
            m.value = v;
        }
        out.push_back(std::move(m));
    }
    return out;
}

CoarseSeries build_coarse_series(std::span<const Measurement> ms) {
    if (ms.empty()) fail(errc::invalid, "build_coarse_series: empty measurement list");
    struct DayAgg {
        double max_value = 0.0;
        bool any_value = false;
        double max_loq = 0.0;
    };
    std::map<Day, DayAgg> days;
    for (const auto& m : ms) {
        auto& agg = days[m.day];
        agg.max_loq = std::max(agg.max_loq, m.loq);
        if (m.value) {
            agg.max_value = agg.any_value ? std::max(agg.max_value, *m.value) : *m.value;
            agg.any_value = true;
        }
    }
    CoarseSeries series;
    series.entries.reserve(days.size());
    for (const auto& [day, agg] : days) {
        if (agg.any_value)
            series.entries.push_back({day, agg.max_value, agg.max_loq, false});
        else
            series.entries.push_back({day, agg.max_loq, agg.max_loq, true});
    }
    return series;
}

void write_measurements_csv(std::span<const Measurement> ms, std::ostream& out) {
    out << "station_id,date,loq,value\n";
    char buf[64];
    for (const auto& m : ms) {
        out << m.station_id << ',' << format_date(m.day) << ',';
        std::snprintf(buf, sizeof buf, "%.17g,", m.loq);
        out << buf;
        if (m.value) {
            std::snprintf(buf, sizeof buf, "%.17g", *m.value);
            out << buf;
        }
        out << '\n';
    }
}

std::set<std::string> active_stations(std::span<const Measurement> ms, Day start, Day end) {
    if (start > end) fail(errc::invalid, "active_stations: interval start after end");
    std::set<std::string> out;
    for (const auto& m : ms)
        if (m.day >= start && m.day <= end) out.insert(m.station_id);
    return out;
}

void write_coarse_csv(const CoarseSeries& s, std::ostream& out) {
    out << "day,y_bar,q_bar,censored\n";
    char buf[96];
    for (const auto& e : s.entries) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d\n", format_date(e.day).c_str(), e.y_bar,
                      e.q_bar, e.censored ? 1 : 0);
        out << buf;
    }
}

CoarseSeries read_coarse_csv(std::istream& in) {
    CoarseSeries s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (line_no == 1) {
            if (sv != "day,y_bar,q_bar,censored")
                fail(errc::parse, "line 1: expected header 'day,y_bar,q_bar,censored'");
            continue;
        }
        const auto fields = split_csv(sv);
        if (fields.size() != 4)
            fail(errc::parse, "line " + std::to_string(line_no) + ": expected 4 fields");
        CoarseEntry e;
        e.day = parse_date(fields[0]);
        e.y_bar = parse_double(fields[1], line_no, "y_bar");
        e.q_bar = parse_double(fields[2], line_no, "q_bar");
        const std::string_view c = trim(fields[3]);
        if (c == "1" || c == "true")
            e.censored = true;
        else if (c == "0" || c == "false")
            e.censored = false;
        else
            fail(errc::parse, "line " + std::to_string(line_no) + ": malformed censored flag");
        if (!s.entries.empty() && e.day <= s.entries.back().day)
            fail(errc::invalid, "line " + std::to_string(line_no) + ": days not strictly increasing");
        s.entries.push_back(e);
    }
    if (s.empty()) fail(errc::invalid, "coarse series file has no entries");
    return s;
}

CensoredSample to_censored_sample(const CoarseSeries& s, std::size_t a, std::size_t b) {
    if (a >= b || b > s.size()) fail(errc::invalid, "to_censored_sample: bad index range");
    CensoredSample out;
    out.points.reserve(b - a);
    for (std::size_t k = a; k < b; ++k) {
        const auto& e = s.entries[k];
        if (e.censored)
            out.push_censored(e.q_bar);
        else
            out.push_uncensored(e.y_bar, e.q_bar);
    }
    return out;
}

}  // namespace censeg
