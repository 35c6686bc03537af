#include "censeg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "censeg/csv.hpp"
#include "censeg/error.hpp"
#include "censeg/svg.hpp"

namespace censeg {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(errc::io, "cannot open '" + path + "'");
    return f;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) fail(errc::io, "cannot write '" + path.string() + "'");
    f << content;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / path).string();
}

}  // namespace

void PipelineConfig::validate() const {
    if (measurements_path.empty()) fail(errc::invalid, "config: 'measurements' is required");
    if (river_nodes_path.empty()) fail(errc::invalid, "config: 'river_nodes' is required");
    if (river_edges_path.empty()) fail(errc::invalid, "config: 'river_edges' is required");
    if (stations_path.empty()) fail(errc::invalid, "config: 'stations' is required");
    if (!(penalty_factor_min >= 0.0 && penalty_factor_min < penalty_factor_max))
        fail(errc::invalid, "config: penalty factors must satisfy 0 <= min < max");
    if (min_segment_length < 1) fail(errc::invalid, "config: min_segment_length must be >= 1");
    if (m_max != 0 && m_min > m_max) fail(errc::invalid, "config: m_min > m_max");
    if (!(box.lambda_min > 0 && box.lambda_min < box.lambda_max && box.sigma_min > 0 &&
          box.sigma_min < box.sigma_max))
        fail(errc::invalid, "config: malformed feasibility box");
}

PipelineConfig parse_pipeline_config(std::istream& in, const std::string& base_dir) {
    PipelineConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            fail(errc::parse, "config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key{trim(sv.substr(0, eq))};
        const std::string value{trim(sv.substr(eq + 1))};
        if (key == "measurements") cfg.measurements_path = resolve(base_dir, value);
        else if (key == "river_nodes") cfg.river_nodes_path = resolve(base_dir, value);
        else if (key == "river_edges") cfg.river_edges_path = resolve(base_dir, value);
        else if (key == "stations") cfg.stations_path = resolve(base_dir, value);
        else if (key == "output_dir") cfg.output_dir = resolve(base_dir, value);
        else if (key == "penalty_factor_min") cfg.penalty_factor_min = parse_double(value, line_no, key.c_str());
        else if (key == "penalty_factor_max") cfg.penalty_factor_max = parse_double(value, line_no, key.c_str());
        else if (key == "min_segment_length") cfg.min_segment_length = parse_long(value, line_no, key.c_str());
        else if (key == "lambda_min") cfg.box.lambda_min = parse_double(value, line_no, key.c_str());
        else if (key == "lambda_max") cfg.box.lambda_max = parse_double(value, line_no, key.c_str());
        else if (key == "sigma_min") cfg.box.sigma_min = parse_double(value, line_no, key.c_str());
        else if (key == "sigma_max") cfg.box.sigma_max = parse_double(value, line_no, key.c_str());
        else if (key == "m_min") cfg.m_min = parse_long(value, line_no, key.c_str());
        else if (key == "m_max") cfg.m_max = parse_long(value, line_no, key.c_str());
        else if (key == "interval") cfg.interval = parse_long(value, line_no, key.c_str());
        else if (key == "interval_date") cfg.interval_date = parse_date(value);
        else if (key == "all_intervals") cfg.all_intervals = value == "1" || value == "true";
        else if (key == "include_degenerate") cfg.include_degenerate = value == "1" || value == "true";
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, line_no, key.c_str()));
        else fail(errc::parse, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (const char* env = std::getenv("CENSEG_SEED"))
        cfg.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream f = open_input(path);
    return parse_pipeline_config(f, fs::path(path).parent_path().string());
}

std::string segmentation_to_json(const Segmentation& seg,
                                 const std::vector<std::pair<Day, Day>>& segment_spans,
                                 std::size_t k) {
    if (segment_spans.size() != seg.segment_count())
        fail(errc::invalid, "segmentation_to_json: span count mismatch");
    ordered_json j;
    j["sigma_hat"] = seg.sigma_hat;
    j["penalty"] = seg.penalty;
    ordered_json breaks = ordered_json::array();
    for (std::size_t l = 1; l < segment_spans.size(); ++l)
        breaks.push_back(format_date(segment_spans[l].first));
    j["breaks"] = breaks;
    j["rates"] = seg.rates;
    j["cost"] = seg.cost;
    j["nll"] = seg.nll;
    j["break_indices"] = seg.breaks;
    j["k"] = k;
    ordered_json segments = ordered_json::array();
    for (std::size_t l = 0; l < segment_spans.size(); ++l) {
        ordered_json item;
        item["start"] = format_date(segment_spans[l].first);
        item["end"] = format_date(segment_spans[l].second);
        item["rate"] = seg.rates[l];
        item["degenerate"] = static_cast<bool>(seg.degenerate[l]);
        segments.push_back(item);
    }
    j["segments"] = segments;
    return j.dump(2) + "\n";
}

std::string segmentation_to_json(const Segmentation& seg, const CoarseSeries& series) {
    std::vector<std::pair<Day, Day>> spans;
    std::size_t prev = 0;
    for (std::size_t l = 0; l <= seg.breaks.size(); ++l) {
        const std::size_t end = l < seg.breaks.size() ? seg.breaks[l] : series.size();
        spans.emplace_back(series.entries[prev].day, series.entries[end - 1].day);
        prev = end;
    }
    return segmentation_to_json(seg, spans, series.size());
}

SegmentationInfo segmentation_from_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse, std::string("segmentation JSON: ") + e.what());
    }
    SegmentationInfo info;
    try {
        info.k = j.value("k", static_cast<std::size_t>(0));
        info.segmentation.sigma_hat = j.at("sigma_hat").get<double>();
        info.segmentation.penalty = j.at("penalty").get<double>();
        info.segmentation.cost = j.at("cost").get<double>();
        info.segmentation.nll = j.value("nll", 0.0);
        info.segmentation.breaks = j.at("break_indices").get<std::vector<std::size_t>>();
        info.segmentation.rates = j.at("rates").get<std::vector<double>>();
        for (const auto& s : j.at("segments")) {
            info.segment_spans.emplace_back(parse_date(s.at("start").get<std::string>()),
                                            parse_date(s.at("end").get<std::string>()));
            info.segmentation.degenerate.push_back(s.value("degenerate", false));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse, std::string("segmentation JSON: ") + e.what());
    }
    if (info.segment_spans.size() != info.segmentation.rates.size())
        fail(errc::parse, "segmentation JSON: segments/rates size mismatch");
    return info;
}

std::string clustering_to_csv(const StationGraph& g, const Clustering& c) {
    std::ostringstream out;
    out << "station_id,cluster_id\n";
    for (std::size_t i = 0; i < g.station_count(); ++i)
        out << g.stations()[i].id << ',' << c.assignment[i] << '\n';
    return out.str();
}

std::string clustering_to_json(const StationGraph& g, const ClusterHierarchy& h,
                               const Clustering& c, std::size_t m_min, std::size_t m_max) {
    ordered_json j;
    j["n_clusters"] = c.n_clusters;
    j["inertia"] = c.inertia;
    j["m_range"] = {m_min, m_max};
    ordered_json assignments = ordered_json::object();
    for (std::size_t i = 0; i < g.station_count(); ++i)
        assignments[g.stations()[i].id] = c.assignment[i];
    j["assignments"] = assignments;
    ordered_json levels = ordered_json::array();
    for (const auto& lvl : h.levels) {
        ordered_json item;
        item["m"] = lvl.n_clusters;
        item["inertia"] = lvl.inertia;
        levels.push_back(item);
    }
    j["levels"] = levels;
    return j.dump(2) + "\n";
}

std::string graph_to_json(const StationGraph& g) {
    ordered_json j;
    ordered_json stations = ordered_json::array();
    for (std::size_t i = 0; i < g.station_count(); ++i) {
        ordered_json item;
        item["id"] = g.stations()[i].id;
        item["x"] = g.stations()[i].x;
        item["y"] = g.stations()[i].y;
        item["component"] = g.component_of(i);
        stations.push_back(item);
    }
    j["stations"] = stations;
    ordered_json edges = ordered_json::array();
    for (std::size_t c = 0; c < g.component_count(); ++c) {
        const auto& members = g.component_members(c);
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                ordered_json item;
                item["a"] = g.stations()[members[a]].id;
                item["b"] = g.stations()[members[b]].id;
                item["w"] = g.distance(members[a], members[b]);
                edges.push_back(item);
            }
    }
    j["edges"] = edges;
    j["n_components"] = g.component_count();
    return j.dump(2) + "\n";
}

std::string report_to_json(std::span<const ClusterScore> scores, Day start, Day end,
                           double sigma_hat) {
    ordered_json j;
    j["interval"] = {format_date(start), format_date(end)};
    j["sigma_hat"] = sigma_hat;
    ordered_json clusters = ordered_json::array();
    for (const auto& c : scores) {
        ordered_json item;
        item["id"] = c.cluster_id;
        item["stations"] = c.stations;
        item["n_measurements"] = c.n_measurements;
        item["n_quantified"] = c.n_quantified;
        item["W_bar"] = c.w_bar;
        item["I_bar"] = c.i_bar;
        item["pareto_level"] = c.pareto_level;
        ordered_json flags = ordered_json::array();
        if (c.singleton) flags.push_back("singleton");
        if (c.degenerate) flags.push_back("degenerate");
        item["flags"] = flags;
        clusters.push_back(item);
    }
    j["clusters"] = clusters;
    return j.dump(2) + "\n";
}

std::string report_to_csv(std::span<const ClusterScore> scores) {
    std::ostringstream out;
    out << "cluster_id,n_stations,n_measurements,n_quantified,W_bar,I_bar,pareto_level,flags\n";
    char buf[160];
    for (const auto& c : scores) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.17g,%.17g,%d,", c.cluster_id,
                      c.stations.size(), c.n_measurements, c.n_quantified, c.w_bar, c.i_bar,
                      c.pareto_level);
        out << buf;
        if (c.singleton) out << "singleton";
        if (c.singleton && c.degenerate) out << '|';
        if (c.degenerate) out << "degenerate";
        out << '\n';
    }
    return out.str();
}

namespace {

struct SpatialArtifacts {
    StationGraph graph;
    ClusterHierarchy hierarchy;
    Clustering clustering;
    std::vector<ClusterScore> scores;
    std::size_t m_min = 0;
    std::size_t m_max = 0;
};

SpatialArtifacts spatial_stage(const PipelineConfig& cfg, const StationGraph& full_graph,
                               std::span<const Measurement> ms, Day start, Day end,
                               double sigma_hat) {
    const auto active = active_stations(ms, start, end);
    if (active.empty()) fail(errc::invalid, "spatial stage: no active station in the interval");

    SpatialArtifacts art{full_graph.induced(active), {}, {}, {}, 0, 0};
    const MRange range = resolve_m_range(art.graph, cfg.m_min, cfg.m_max);
    art.m_min = range.m_min;
    art.m_max = range.m_max;
    art.hierarchy = greedy_global_hierarchy(art.graph);
    art.clustering = select_clustering(art.hierarchy, art.m_min, art.m_max);
    RankOptions ropts;
    ropts.sigma_hat = sigma_hat;
    ropts.box = cfg.box;
    ropts.include_degenerate = cfg.include_degenerate;
    art.scores = rank_clusters(art.graph, art.clustering, ms, start, end, ropts);
    return art;
}

void write_spatial_artifacts(const SpatialArtifacts& art, const fs::path& dir, Day start, Day end,
                             double sigma_hat) {
    write_file(dir / "clustering.csv", clustering_to_csv(art.graph, art.clustering));
    write_file(dir / "clustering.json",
               clustering_to_json(art.graph, art.hierarchy, art.clustering, art.m_min, art.m_max));
    write_file(dir / "graph.json", graph_to_json(art.graph));

    std::vector<std::pair<double, double>> pts;
    std::size_t knee = 0;
    for (std::size_t i = 0; i < art.hierarchy.levels.size(); ++i) {
        const auto& lvl = art.hierarchy.levels[i];
        if (lvl.n_clusters < art.m_min || lvl.n_clusters > art.m_max) continue;
        if (lvl.n_clusters == art.clustering.n_clusters) knee = pts.size();
        pts.emplace_back(static_cast<double>(lvl.n_clusters), lvl.inertia);
    }
    write_file(dir / "elbow.svg", svg_elbow_plot(pts, knee, "clusters M", "inertia W"));
    write_file(dir / "anomaly_report.json", report_to_json(art.scores, start, end, sigma_hat));
    write_file(dir / "anomaly_report.csv", report_to_csv(art.scores));
    write_file(dir / "pareto.svg", svg_pareto_plot(art.scores));
    write_file(dir / "map.svg", svg_station_map(art.graph, art.clustering, art.scores));
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    for (const auto& p : {cfg.measurements_path, cfg.river_nodes_path, cfg.river_edges_path,
                          cfg.stations_path})
        if (!fs::exists(p)) fail(errc::io, "input file missing: '" + p + "'");

    auto m_in = open_input(cfg.measurements_path);
    const std::vector<Measurement> ms = parse_measurements(m_in);
    if (ms.empty()) fail(errc::invalid, "measurements file has no data rows");
    const CoarseSeries series = build_coarse_series(ms);

    fs::create_directories(cfg.output_dir);
    const fs::path out_dir(cfg.output_dir);
    {
        std::ostringstream coarse;
        write_coarse_csv(series, coarse);
        write_file(out_dir / "coarse.csv", coarse.str());
    }

    SegmentPipelineOptions sopts;
    sopts.penalty_factor_min = cfg.penalty_factor_min;
    sopts.penalty_factor_max = cfg.penalty_factor_max;
    sopts.min_segment_length = cfg.min_segment_length;
    sopts.box = cfg.box;
    const SegmentPipelineResult seg = segment_pipeline(series, sopts);
    write_file(out_dir / "segmentation.json", segmentation_to_json(seg.segmentation, series));
    write_file(out_dir / "segmentation.svg", svg_segmentation_plot(series, seg.segmentation));

    auto nodes_in = open_input(cfg.river_nodes_path);
    auto edges_in = open_input(cfg.river_edges_path);
    const RiverNetwork river = read_river_network(nodes_in, edges_in);
    auto stations_in = open_input(cfg.stations_path);
    const StationGraph full_graph = StationGraph::build(read_stations_csv(stations_in), river);

    // segment bounds as closed day intervals
    std::vector<std::pair<Day, Day>> spans;
    std::size_t prev = 0;
    for (std::size_t l = 0; l <= seg.segmentation.breaks.size(); ++l) {
        const std::size_t end =
            l < seg.segmentation.breaks.size() ? seg.segmentation.breaks[l] : series.size();
        spans.emplace_back(series.entries[prev].day, series.entries[end - 1].day);
        prev = end;
    }

    const auto run_interval = [&](std::size_t l, const fs::path& dir) {
        fs::create_directories(dir);
        const auto [start, end] = spans[l];
        const SpatialArtifacts art =
            spatial_stage(cfg, full_graph, ms, start, end, seg.sigma_hat);
        write_spatial_artifacts(art, dir, start, end, seg.sigma_hat);
    };

    if (cfg.all_intervals) {
        for (std::size_t l = 0; l < spans.size(); ++l) {
            char name[32];
            std::snprintf(name, sizeof name, "interval_%02zu", l);
            run_interval(l, out_dir / name);
        }
        return;
    }

    std::size_t chosen = 0;
    if (cfg.interval >= 0) {
        if (static_cast<std::size_t>(cfg.interval) >= spans.size())
            fail(errc::invalid, "interval index " + std::to_string(cfg.interval) +
                                    " out of range (have " + std::to_string(spans.size()) +
                                    " segments)");
        chosen = static_cast<std::size_t>(cfg.interval);
    } else if (cfg.interval_date) {
        bool found = false;
        for (std::size_t l = 0; l < spans.size(); ++l)
            if (*cfg.interval_date >= spans[l].first && *cfg.interval_date <= spans[l].second) {
                chosen = l;
                found = true;
                break;
            }
        if (!found)
            fail(errc::invalid, "interval_date " + format_date(*cfg.interval_date) +
                                    " is not covered by any stationary segment");
    }
    run_interval(chosen, out_dir);
}

void convert_geojson(std::istream& geojson, std::ostream& nodes_csv, std::ostream& edges_csv) {
    nlohmann::json j;
    try {
        geojson >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse, std::string("GeoJSON: ") + e.what());
    }
    std::vector<std::pair<double, double>> nodes;
    std::map<std::pair<double, double>, std::size_t> index;
    struct Edge {
        std::size_t a, b;
        double length;
    };
    std::vector<Edge> edges;
    const auto add_node = [&](double x, double y) {
        const auto [it, inserted] = index.emplace(std::make_pair(x, y), nodes.size());
        if (inserted) nodes.emplace_back(x, y);
        return it->second;
    };
    const auto add_line = [&](const nlohmann::json& coords) {
        std::size_t prev = 0;
        bool have_prev = false;
        for (const auto& pt : coords) {
            if (!pt.is_array() || pt.size() < 2) fail(errc::parse, "GeoJSON: malformed coordinate");
            const double x = pt[0].get<double>();
            const double y = pt[1].get<double>();
            const std::size_t cur = add_node(x, y);
            if (have_prev && cur != prev) {
                const double dx = x - nodes[prev].first;
                const double dy = y - nodes[prev].second;
                edges.push_back({prev, cur, std::sqrt(dx * dx + dy * dy)});
            }
            prev = cur;
            have_prev = true;
        }
    };
    const auto handle_geometry = [&](const nlohmann::json& geom) {
        const std::string type = geom.value("type", "");
        if (type == "LineString")
            add_line(geom.at("coordinates"));
        else if (type == "MultiLineString")
            for (const auto& line : geom.at("coordinates")) add_line(line);
    };
    if (j.value("type", "") == "FeatureCollection")
        for (const auto& feature : j.at("features")) handle_geometry(feature.at("geometry"));
    else
        handle_geometry(j);
    if (nodes.empty()) fail(errc::invalid, "GeoJSON: no LineString geometry found");

    nodes_csv << "node_id,x_m,y_m\n";
    char buf[128];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "g%zu,%.17g,%.17g\n", i, nodes[i].first, nodes[i].second);
        nodes_csv << buf;
    }
    edges_csv << "node_a,node_b,length_m\n";
    for (const auto& e : edges) {
        std::snprintf(buf, sizeof buf, "g%zu,g%zu,%.17g\n", e.a, e.b, e.length);
        edges_csv << buf;
    }
}

}  // namespace censeg
