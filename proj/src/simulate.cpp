#include "censeg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "censeg/csv.hpp"
#include "censeg/error.hpp"
#include "censeg/ingest.hpp"

namespace censeg {

namespace {

using ordered_json = nlohmann::ordered_json;

double next_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto pos = v.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(trim(v.substr(start)));
            break;
        }
        out.emplace_back(trim(v.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

}  // namespace

void SimulationSpec::validate() const {
    if (n_rivers == 0 || stations_per_river == 0) fail(errc::invalid, "simulate: need stations");
    if (n_days == 0) fail(errc::invalid, "simulate: n_days must be > 0");
    if (!(sampling_prob > 0.0 && sampling_prob <= 1.0))
        fail(errc::invalid, "simulate: sampling_prob must be in (0,1]");
    if (!(loq > 0.0) || !(sigma > 0.0)) fail(errc::invalid, "simulate: loq and sigma must be > 0");
    if (lambdas.size() != break_offsets.size() + 1)
        fail(errc::invalid, "simulate: need one lambda per regime (breaks + 1)");
    for (const double l : lambdas)
        if (!(l > 0.0)) fail(errc::invalid, "simulate: lambdas must be > 0");
    for (std::size_t i = 0; i < break_offsets.size(); ++i) {
        if (break_offsets[i] == 0 || break_offsets[i] >= n_days)
            fail(errc::invalid, "simulate: break offsets must lie inside (0, n_days)");
        if (i > 0 && break_offsets[i] <= break_offsets[i - 1])
            fail(errc::invalid, "simulate: break offsets must be strictly increasing");
    }
    if (anomaly_river >= static_cast<long>(n_rivers))
        fail(errc::invalid, "simulate: anomaly_river out of range");
    for (const std::size_t r : anomaly_regimes)
        if (r >= lambdas.size()) fail(errc::invalid, "simulate: anomaly regime out of range");
    if (!(anomaly_factor > 0.0)) fail(errc::invalid, "simulate: anomaly_factor must be > 0");
}

SimulationSpec parse_simulation_spec(std::istream& in) {
    SimulationSpec spec;
    spec.break_offsets.clear();
    spec.lambdas.clear();
    std::string line;
    std::size_t line_no = 0;
    bool got_lambdas = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            fail(errc::parse, "spec line " + std::to_string(line_no) + ": expected key = value");
        const std::string key{trim(sv.substr(0, eq))};
        const std::string_view value = trim(sv.substr(eq + 1));
        if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_long(value, line_no, key.c_str()));
        else if (key == "n_rivers") spec.n_rivers = parse_long(value, line_no, key.c_str());
        else if (key == "stations_per_river") spec.stations_per_river = parse_long(value, line_no, key.c_str());
        else if (key == "node_spacing_m") spec.node_spacing_m = parse_double(value, line_no, key.c_str());
        else if (key == "start_date") spec.start_day = parse_date(value);
        else if (key == "n_days") spec.n_days = parse_long(value, line_no, key.c_str());
        else if (key == "sampling_prob") spec.sampling_prob = parse_double(value, line_no, key.c_str());
        else if (key == "loq") spec.loq = parse_double(value, line_no, key.c_str());
        else if (key == "sigma") spec.sigma = parse_double(value, line_no, key.c_str());
        else if (key == "breaks") {
            for (const auto& tok : split_list(value))
                if (!tok.empty()) spec.break_offsets.push_back(parse_long(tok, line_no, "breaks"));
        } else if (key == "lambdas") {
            got_lambdas = true;
            for (const auto& tok : split_list(value))
                if (!tok.empty()) spec.lambdas.push_back(parse_double(tok, line_no, "lambdas"));
        } else if (key == "anomaly_river") spec.anomaly_river = parse_long(value, line_no, key.c_str());
        else if (key == "anomaly_factor") spec.anomaly_factor = parse_double(value, line_no, key.c_str());
        else if (key == "anomaly_regimes") {
            for (const auto& tok : split_list(value))
                if (!tok.empty()) spec.anomaly_regimes.push_back(parse_long(tok, line_no, "anomaly_regimes"));
        } else
            fail(errc::parse, "spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!got_lambdas) fail(errc::invalid, "spec: missing 'lambdas'");
    spec.validate();
    return spec;
}

SimulatedData simulate(const SimulationSpec& spec) {
    spec.validate();
    SimulatedData out;

    std::ostringstream nodes, edges, stations;
    nodes << "node_id,x_m,y_m\n";
    edges << "node_a,node_b,length_m\n";
    stations << "station_id,x_m,y_m\n";
    char buf[160];
    std::vector<std::string> station_ids;
    std::vector<std::size_t> station_river;
    for (std::size_t r = 0; r < spec.n_rivers; ++r) {
        for (std::size_t k = 0; k < spec.stations_per_river; ++k) {
            const double x = static_cast<double>(k) * spec.node_spacing_m;
            const double y = static_cast<double>(r) * 5.0 * spec.node_spacing_m;
            std::snprintf(buf, sizeof buf, "n%zu_%zu,%.17g,%.17g\n", r, k, x, y);
            nodes << buf;
            if (k > 0) {
                std::snprintf(buf, sizeof buf, "n%zu_%zu,n%zu_%zu,%.17g\n", r, k - 1, r, k,
                              spec.node_spacing_m);
                edges << buf;
            }
            // stations sit a little off their node so snapping does real work
            std::snprintf(buf, sizeof buf, "S%zu_%zu,%.17g,%.17g\n", r, k,
                          x + 0.11 * spec.node_spacing_m, y + 0.07 * spec.node_spacing_m);
            stations << buf;
            std::snprintf(buf, sizeof buf, "S%zu_%zu", r, k);
            station_ids.emplace_back(buf);
            station_river.push_back(r);
        }
    }

    const auto regime_of = [&](std::size_t day_offset) {
        std::size_t r = 0;
        while (r < spec.break_offsets.size() && day_offset >= spec.break_offsets[r]) ++r;
        return r;
    };
    const auto is_anomalous = [&](std::size_t river, std::size_t regime) {
        if (spec.anomaly_river < 0 || river != static_cast<std::size_t>(spec.anomaly_river))
            return false;
        return std::find(spec.anomaly_regimes.begin(), spec.anomaly_regimes.end(), regime) !=
               spec.anomaly_regimes.end();
    };

    std::mt19937_64 rng(spec.seed);
    std::ostringstream ms;
    ms << "station_id,date,loq,value\n";
    for (std::size_t d = 0; d < spec.n_days; ++d) {
        const std::size_t regime = regime_of(d);
        const std::string date = format_date(spec.start_day + static_cast<Day>(d));
        for (std::size_t s = 0; s < station_ids.size(); ++s) {
            if (next_uniform(rng) >= spec.sampling_prob) continue;
            double lambda = spec.lambdas[regime];
            if (is_anomalous(station_river[s], regime)) lambda /= spec.anomaly_factor;
            const double u = next_uniform(rng);
            const double y = std::pow(-std::log(u), 1.0 / spec.sigma) / lambda;
            if (y < spec.loq)
                std::snprintf(buf, sizeof buf, "%s,%s,%.17g,\n", station_ids[s].c_str(),
                              date.c_str(), spec.loq);
            else
                std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g\n", station_ids[s].c_str(),
                              date.c_str(), spec.loq, y);
            ms << buf;
        }
    }

    ordered_json truth;
    truth["seed"] = spec.seed;
    truth["sigma"] = spec.sigma;
    truth["loq"] = spec.loq;
    truth["start_date"] = format_date(spec.start_day);
    truth["n_days"] = spec.n_days;
    ordered_json breaks = ordered_json::array();
    for (const std::size_t b : spec.break_offsets) {
        ordered_json item;
        item["day_offset"] = b;
        item["date"] = format_date(spec.start_day + static_cast<Day>(b));
        breaks.push_back(item);
    }
    truth["breaks"] = breaks;
    truth["lambdas"] = spec.lambdas;
    ordered_json st = ordered_json::object();
    for (std::size_t s = 0; s < station_ids.size(); ++s) st[station_ids[s]] = station_river[s];
    truth["station_river"] = st;
    truth["anomaly_river"] = spec.anomaly_river;
    truth["anomaly_factor"] = spec.anomaly_factor;
    truth["anomaly_regimes"] = spec.anomaly_regimes;

    std::ostringstream ini;
    ini << "measurements = " << SimulatedFiles::measurements << "\n"
        << "river_nodes = " << SimulatedFiles::river_nodes << "\n"
        << "river_edges = " << SimulatedFiles::river_edges << "\n"
        << "stations = " << SimulatedFiles::stations << "\n"
        << "output_dir = out\n"
        << "seed = " << spec.seed << "\n";
    if (!spec.anomaly_regimes.empty()) {
        // midpoint of the first anomalous regime, so the spatial stage lands on it
        const std::size_t regime = spec.anomaly_regimes.front();
        const std::size_t lo = regime == 0 ? 0 : spec.break_offsets[regime - 1];
        const std::size_t hi =
            regime < spec.break_offsets.size() ? spec.break_offsets[regime] : spec.n_days;
        ini << "interval_date = " << format_date(spec.start_day + static_cast<Day>((lo + hi) / 2))
            << "\n";
    } else {
        ini << "interval = 0\n";
    }

    out.measurements_csv = ms.str();
    out.river_nodes_csv = nodes.str();
    out.river_edges_csv = edges.str();
    out.stations_csv = stations.str();
    out.truth_json = truth.dump(2) + "\n";
    out.pipeline_ini = ini.str();
    return out;
}

void write_simulation(const SimulationSpec& spec, const std::string& out_dir) {
    const SimulatedData data = simulate(spec);
    std::filesystem::create_directories(out_dir);
    const auto write = [&](const char* name, const std::string& content) {
        const auto path = std::filesystem::path(out_dir) / name;
        std::ofstream f(path);
        if (!f) fail(errc::io, "cannot write '" + path.string() + "'");
        f << content;
    };
    write(SimulatedFiles::measurements, data.measurements_csv);
    write(SimulatedFiles::river_nodes, data.river_nodes_csv);
    write(SimulatedFiles::river_edges, data.river_edges_csv);
    write(SimulatedFiles::stations, data.stations_csv);
    write(SimulatedFiles::truth, data.truth_json);
    write(SimulatedFiles::pipeline, data.pipeline_ini);
}

}  // namespace censeg
