#ifndef CENSEG_INGEST_HPP
#define CENSEG_INGEST_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "censeg/date.hpp"
#include "censeg/weibull.hpp"

namespace censeg {

// One raw record: a station sample with its quantification limit. A missing value
// means the concentration was below the limit (left-censored).
struct Measurement {
    std::string station_id;
    Day day;
    double loq;                   // > 0
    std::optional<double> value;  // present => value >= loq

    bool censored() const { return !value.has_value(); }
};

// Daily maxima across the whole network. A censored day means every measurement of
// that day was censored; then y_bar == q_bar (the largest limit of the day).
struct CoarseEntry {
    Day day;
    double y_bar;
    double q_bar;
    bool censored;
};

struct CoarseSeries {
    std::vector<CoarseEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

// CSV schema: station_id,date,loq,value with a header row; empty value => censored.
std::vector<Measurement> parse_measurements(std::istream& in);

// Column-mapped ingestion for third-party exports (separator, header names, and an
// optional qualifier column marking below-LOQ rows). With a qualifier column the
// value field of censored rows is ignored; without one, an empty value field means
// censored. decimal_comma converts "0,05" style numerics before parsing.
struct ColumnMapping {
    char separator = ',';
    std::string station_col = "station_id";
    std::string date_col = "date";
    std::string loq_col = "loq";
    std::string value_col = "value";
    std::string qualifier_col;    // empty: censoring by empty value field
    std::string censored_code;    // qualifier value meaning "below LOQ"
    bool decimal_comma = false;
};

std::vector<Measurement> parse_measurements_mapped(std::istream& in, const ColumnMapping& map);

// Native-schema writer; lets mapped ingestion normalize an export once.
void write_measurements_csv(std::span<const Measurement> ms, std::ostream& out);

CoarseSeries build_coarse_series(std::span<const Measurement> ms);

// Stations with at least one measurement inside the closed day interval.
std::set<std::string> active_stations(std::span<const Measurement> ms, Day start, Day end);

// CSV schema: day,y_bar,q_bar,censored (censored written as 0/1).
void write_coarse_csv(const CoarseSeries& s, std::ostream& out);
CoarseSeries read_coarse_csv(std::istream& in);

// Entries [a, b) of the coarse series as a censored sample for the Weibull fits.
CensoredSample to_censored_sample(const CoarseSeries& s, std::size_t a, std::size_t b);

}  // namespace censeg

#endif
