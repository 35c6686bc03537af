#ifndef CENSEG_PIPELINE_HPP
#define CENSEG_PIPELINE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "censeg/anomaly.hpp"
#include "censeg/changepoint.hpp"
#include "censeg/cluster.hpp"
#include "censeg/ingest.hpp"
#include "censeg/simulate.hpp"
#include "censeg/station_graph.hpp"

namespace censeg {

struct PipelineConfig {
    std::string measurements_path;
    std::string river_nodes_path;
    std::string river_edges_path;
    std::string stations_path;
    std::string output_dir = "out";
    double penalty_factor_min = 0.2;  // times log K
    double penalty_factor_max = 5.0;
    std::size_t min_segment_length = 2;
    FitBox box{};
    std::size_t m_min = 0;  // 0 = component count
    std::size_t m_max = 0;  // 0 = min(35, n-1)
    long interval = -1;     // stationary segment index; -1 = use interval_date
    std::optional<Day> interval_date;
    bool all_intervals = false;
    bool include_degenerate = false;  // rank all-censored clusters instead of flooring them
    std::uint64_t seed = 42;

    void validate() const;
};

// INI parsing; relative paths resolve against base_dir (the config file's directory).
// The CENSEG_SEED environment variable overrides the seed.
PipelineConfig parse_pipeline_config(std::istream& in, const std::string& base_dir);
PipelineConfig load_pipeline_config(const std::string& path);

// Artifact (de)serialization. Segment date spans and break indices ride along with
// the spec fields so artifacts round-trip without the series.
std::string segmentation_to_json(const Segmentation& seg, const CoarseSeries& series);
std::string segmentation_to_json(const Segmentation& seg,
                                 const std::vector<std::pair<Day, Day>>& segment_spans,
                                 std::size_t k);
struct SegmentationInfo {
    Segmentation segmentation;
    std::vector<std::pair<Day, Day>> segment_spans;  // closed [first, last] entry days
    std::size_t k = 0;                               // series length
};
SegmentationInfo segmentation_from_json(std::istream& in);

std::string clustering_to_csv(const StationGraph& g, const Clustering& c);
std::string clustering_to_json(const StationGraph& g, const ClusterHierarchy& h,
                               const Clustering& c, std::size_t m_min, std::size_t m_max);
std::string graph_to_json(const StationGraph& g);
std::string report_to_json(std::span<const ClusterScore> scores, Day start, Day end,
                           double sigma_hat);
std::string report_to_csv(std::span<const ClusterScore> scores);

// Full run: ingest, temporal segmentation, then the spatial stage on the configured
// interval(s). Writes coarse.csv, segmentation.json/.svg, clustering.csv/.json,
// elbow.svg, anomaly_report.json/.csv, pareto.svg, map.svg under output_dir.
void run_pipeline(const PipelineConfig& cfg);

// rivers-from-GeoJSON utility: every LineString vertex becomes a node, consecutive
// vertices become sections weighted by Euclidean length.
void convert_geojson(std::istream& geojson, std::ostream& nodes_csv, std::ostream& edges_csv);

}  // namespace censeg

#endif
