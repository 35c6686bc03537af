#ifndef CENSEG_SIMULATE_HPP
#define CENSEG_SIMULATE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "censeg/date.hpp"

namespace censeg {

// Synthetic monitoring campaign: parallel rivers laid out as station chains, a
// piece-wise stationary censored Weibull signal, and optionally one river whose
// concentrations are scaled up during chosen regimes.
struct SimulationSpec {
    std::uint64_t seed = 1;
    std::size_t n_rivers = 3;
    std::size_t stations_per_river = 4;
    double node_spacing_m = 1000.0;
    Day start_day = days_from_civil(2019, 1, 1);
    std::size_t n_days = 200;
    double sampling_prob = 0.5;  // per station-day
    double loq = 0.05;
    double sigma = 1.0;
    std::vector<std::size_t> break_offsets;   // day offsets of regime starts (sorted)
    std::vector<double> lambdas;              // one per regime, size = breaks + 1
    long anomaly_river = -1;                  // -1: none
    double anomaly_factor = 10.0;             // concentration multiplier
    std::vector<std::size_t> anomaly_regimes; // regimes where the factor applies

    void validate() const;
};

// INI-style key=value parsing ('#' and ';' comments).
SimulationSpec parse_simulation_spec(std::istream& in);

struct SimulatedData {
    std::string measurements_csv;
    std::string river_nodes_csv;
    std::string river_edges_csv;
    std::string stations_csv;
    std::string truth_json;
    std::string pipeline_ini;  // ready-to-run config referencing the files above
};

// File names used when the simulation is written to a directory.
struct SimulatedFiles {
    static constexpr const char* measurements = "measurements.csv";
    static constexpr const char* river_nodes = "river_nodes.csv";
    static constexpr const char* river_edges = "river_edges.csv";
    static constexpr const char* stations = "stations.csv";
    static constexpr const char* truth = "truth.json";
    static constexpr const char* pipeline = "pipeline.ini";
};

SimulatedData simulate(const SimulationSpec& spec);

void write_simulation(const SimulationSpec& spec, const std::string& out_dir);

}  // namespace censeg

#endif
