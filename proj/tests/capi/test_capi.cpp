// Exercises the shared-library surface through censeg.h only (plus <filesystem>
// for scratch directories); no C++ core headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "censeg.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    REQUIRE(f.good());
    f << content;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

constexpr const char* kToySpec =
    "seed = 7\n"
    "n_rivers = 3\n"
    "stations_per_river = 4\n"
    "start_date = 2019-01-01\n"
    "n_days = 200\n"
    "sampling_prob = 0.5\n"
    "loq = 0.05\n"
    "sigma = 1.0\n"
    "breaks = 100\n"
    "lambdas = 0.5,50\n"
    "anomaly_river = 2\n"
    "anomaly_factor = 10\n"
    "anomaly_regimes = 1\n";

}  // namespace

TEST_CASE("version and error strings") {
    REQUIRE(censeg_version() != nullptr);
    CHECK(std::strlen(censeg_version()) > 0);
    REQUIRE(censeg_last_error() != nullptr);
}

TEST_CASE("dataset: parse, count, errors") {
    censeg_dataset* d = nullptr;
    REQUIRE(censeg_dataset_parse_csv(
                "station_id,date,loq,value\nS1,2017-03-01,0.02,\nS1,2017-03-02,0.02,0.05\n",
                &d) == CENSEG_OK);
    CHECK(censeg_dataset_count(d) == 2);
    censeg_dataset_free(d);

    censeg_dataset* bad = nullptr;
    CHECK(censeg_dataset_parse_csv("station_id,date,loq,value\nS1,2017-03-01,0.02,0.01\n",
                                   &bad) == CENSEG_E_INVALID);
    CHECK(std::string(censeg_last_error()).find("line 2") != std::string::npos);

    CHECK(censeg_dataset_read_csv("/no/such/file.csv", &bad) == CENSEG_E_IO);
    CHECK(std::string(censeg_last_error()).find("/no/such/file.csv") != std::string::npos);

    CHECK(censeg_dataset_parse_csv(nullptr, &bad) == CENSEG_E_INVALID);
    CHECK(censeg_dataset_count(nullptr) == -1);
}

TEST_CASE("column-mapped dataset ingestion") {
    TempDir tmp("censeg_capi_mapped");
    write_file(tmp.file("export.csv"),
               "Station;Date;Q;Res;Lim\n"
               "A;2020-05-01;10;0,01;0,01\n"
               "A;2020-05-02;1;0,25;0,01\n");
    censeg_column_mapping map{};
    map.separator = ';';
    map.station_col = "Station";
    map.date_col = "Date";
    map.loq_col = "Lim";
    map.value_col = "Res";
    map.qualifier_col = "Q";
    map.censored_code = "10";
    map.decimal_comma = 1;
    censeg_dataset* d = nullptr;
    REQUIRE(censeg_dataset_read_csv_mapped(tmp.file("export.csv").c_str(), &map, &d) == CENSEG_OK);
    CHECK(censeg_dataset_count(d) == 2);

    // normalize to the native schema and read it back
    REQUIRE(censeg_dataset_write_csv(d, tmp.file("native.csv").c_str()) == CENSEG_OK);
    censeg_dataset* back = nullptr;
    REQUIRE(censeg_dataset_read_csv(tmp.file("native.csv").c_str(), &back) == CENSEG_OK);
    CHECK(censeg_dataset_count(back) == 2);
    censeg_dataset_free(back);
    censeg_dataset_free(d);

    map.station_col = nullptr;
    CHECK(censeg_dataset_read_csv_mapped(tmp.file("export.csv").c_str(), &map, &d) ==
          CENSEG_E_INVALID);
}

TEST_CASE("active stations array") {
    censeg_dataset* d = nullptr;
    REQUIRE(censeg_dataset_parse_csv(
                "station_id,date,loq,value\nA,2017-01-05,0.02,\nB,2017-02-10,0.02,0.5\n",
                &d) == CENSEG_OK);
    char** ids = nullptr;
    size_t n = 0;
    REQUIRE(censeg_dataset_active_stations(d, "2017-01-01", "2017-01-31", &ids, &n) == CENSEG_OK);
    REQUIRE(n == 1);
    CHECK(std::string(ids[0]) == "A");
    censeg_string_array_free(ids, n);
    CHECK(censeg_dataset_active_stations(d, "2017-01-31", "2017-01-01", &ids, &n) ==
          CENSEG_E_INVALID);
    censeg_dataset_free(d);
}

TEST_CASE("series: build, quantified fraction, csv round trip") {
    TempDir tmp("censeg_capi_series");
    censeg_dataset* d = nullptr;
    REQUIRE(censeg_dataset_parse_csv(
                "station_id,date,loq,value\n"
                "A,2017-01-05,0.02,\nB,2017-01-06,0.02,0.5\nA,2017-01-07,0.02,0.7\n",
                &d) == CENSEG_OK);
    censeg_series* s = nullptr;
    REQUIRE(censeg_series_build(d, &s) == CENSEG_OK);
    CHECK(censeg_series_count(s) == 3);
    double frac = 0.0;
    REQUIRE(censeg_series_quantified_fraction(s, &frac) == CENSEG_OK);
    CHECK(frac == doctest::Approx(2.0 / 3.0));

    const std::string path = tmp.file("coarse.csv");
    REQUIRE(censeg_series_write_csv(s, path.c_str()) == CENSEG_OK);
    censeg_series* back = nullptr;
    REQUIRE(censeg_series_read_csv(path.c_str(), &back) == CENSEG_OK);
    CHECK(censeg_series_count(back) == 3);
    censeg_series_free(back);
    censeg_series_free(s);
    censeg_dataset_free(d);
}

TEST_CASE("full pipeline through the C API handles") {
    TempDir tmp("censeg_capi_flow");
    write_file(tmp.file("toy.ini"), kToySpec);
    REQUIRE(censeg_simulate_file(tmp.file("toy.ini").c_str(), tmp.path.string().c_str()) ==
            CENSEG_OK);

    censeg_dataset* d = nullptr;
    REQUIRE(censeg_dataset_read_csv(tmp.file("measurements.csv").c_str(), &d) == CENSEG_OK);
    censeg_series* s = nullptr;
    REQUIRE(censeg_series_build(d, &s) == CENSEG_OK);

    censeg_segment_options sopts;
    censeg_segment_options_init(&sopts);
    CHECK(sopts.penalty_factor_min == doctest::Approx(0.2));
    censeg_segmentation* seg = nullptr;
    REQUIRE(censeg_segment_run(s, &sopts, &seg) == CENSEG_OK);
    const long n_cp = censeg_segmentation_changepoint_count(seg);
    CHECK(n_cp >= 1);
    CHECK(censeg_segmentation_sigma(seg) > 0.0);
    double rate = 0.0;
    REQUIRE(censeg_segmentation_rate(seg, 0, &rate) == CENSEG_OK);
    CHECK(rate > 0.0);
    CHECK(censeg_segmentation_rate(seg, n_cp + 1, &rate) == CENSEG_E_INVALID);

    // segmentation JSON round trip through the C surface
    REQUIRE(censeg_segmentation_write_json(seg, tmp.file("seg.json").c_str()) == CENSEG_OK);
    censeg_segmentation* seg2 = nullptr;
    REQUIRE(censeg_segmentation_read_json(tmp.file("seg.json").c_str(), &seg2) == CENSEG_OK);
    CHECK(censeg_segmentation_changepoint_count(seg2) == n_cp);
    REQUIRE(censeg_segmentation_write_json(seg2, tmp.file("seg2.json").c_str()) == CENSEG_OK);
    CHECK(slurp(tmp.file("seg.json")) == slurp(tmp.file("seg2.json")));
    REQUIRE(censeg_segmentation_plot_svg(seg, s, tmp.file("seg.svg").c_str()) == CENSEG_OK);

    // pick the last segment (the off-peak regime of the toy fixture)
    char start[16], end[16];
    REQUIRE(censeg_segmentation_interval(seg, n_cp, start, sizeof start, end, sizeof end) ==
            CENSEG_OK);

    char** ids = nullptr;
    size_t n_ids = 0;
    REQUIRE(censeg_dataset_active_stations(d, start, end, &ids, &n_ids) == CENSEG_OK);
    CHECK(n_ids > 0);

    censeg_graph* full = nullptr;
    REQUIRE(censeg_graph_build(tmp.file("river_nodes.csv").c_str(),
                               tmp.file("river_edges.csv").c_str(),
                               tmp.file("stations.csv").c_str(), &full) == CENSEG_OK);
    CHECK(censeg_graph_station_count(full) == 12);
    CHECK(censeg_graph_component_count(full) == 3);

    censeg_graph* induced = nullptr;
    REQUIRE(censeg_graph_induce(full, ids, n_ids, &induced) == CENSEG_OK);
    CHECK(censeg_graph_station_count(induced) == static_cast<long>(n_ids));
    censeg_string_array_free(ids, n_ids);
    REQUIRE(censeg_graph_write_json(induced, tmp.file("graph.json").c_str()) == CENSEG_OK);

    censeg_cluster_options copts;
    censeg_cluster_options_init(&copts);
    censeg_clustering* clustering = nullptr;
    REQUIRE(censeg_cluster_run(induced, &copts, &clustering) == CENSEG_OK);
    CHECK(censeg_clustering_count(clustering) >= 3);
    CHECK(censeg_clustering_inertia(clustering) >= 0.0);
    REQUIRE(censeg_clustering_write_csv(clustering, tmp.file("clust.csv").c_str()) == CENSEG_OK);
    REQUIRE(censeg_clustering_write_json(clustering, tmp.file("clust.json").c_str()) == CENSEG_OK);
    REQUIRE(censeg_clustering_plot_svg(clustering, tmp.file("elbow.svg").c_str()) == CENSEG_OK);

    censeg_report* report = nullptr;
    REQUIRE(censeg_rank_run(d, clustering, start, end, censeg_segmentation_sigma(seg), &report) ==
            CENSEG_OK);
    REQUIRE(censeg_report_count(report) > 0);
    double w = -1.0, in = -1.0;
    long level = 0;
    REQUIRE(censeg_report_score(report, 0, &w, &in, &level) == CENSEG_OK);
    CHECK(level == 1);
    CHECK(w >= 0.0);
    CHECK(in > 0.0);
    REQUIRE(censeg_report_write_json(report, tmp.file("report.json").c_str()) == CENSEG_OK);
    REQUIRE(censeg_report_write_csv(report, tmp.file("report.csv").c_str()) == CENSEG_OK);
    REQUIRE(censeg_report_plot_svg(report, tmp.file("pareto.svg").c_str()) == CENSEG_OK);
    REQUIRE(censeg_report_plot_map_svg(report, tmp.file("map.svg").c_str()) == CENSEG_OK);

    censeg_report_free(report);
    censeg_clustering_free(clustering);
    censeg_graph_free(induced);
    censeg_graph_free(full);
    censeg_segmentation_free(seg2);
    censeg_segmentation_free(seg);
    censeg_series_free(s);
    censeg_dataset_free(d);
}

TEST_CASE("pipeline_run_file writes artifacts and honours overrides") {
    TempDir tmp("censeg_capi_pipeline");
    write_file(tmp.file("toy.ini"), kToySpec);
    REQUIRE(censeg_simulate_file(tmp.file("toy.ini").c_str(),
                                 (tmp.path / "data").string().c_str()) == CENSEG_OK);
    REQUIRE(censeg_pipeline_run_file((tmp.path / "data" / "pipeline.ini").string().c_str(),
                                     (tmp.path / "out").string().c_str(), -1) == CENSEG_OK);
    CHECK(fs::exists(tmp.path / "out" / "anomaly_report.json"));
    CHECK(fs::exists(tmp.path / "out" / "segmentation.svg"));

    CHECK(censeg_pipeline_run_file("/no/such/config.ini", nullptr, -1) == CENSEG_E_IO);
    // interval override far out of range
    CHECK(censeg_pipeline_run_file((tmp.path / "data" / "pipeline.ini").string().c_str(),
                                   (tmp.path / "out2").string().c_str(),
                                   5000) == CENSEG_E_INVALID);
}

TEST_CASE("convert_geojson C entry point") {
    TempDir tmp("censeg_capi_geojson");
    write_file(tmp.file("r.geojson"),
               R"({"type":"FeatureCollection","features":[{"type":"Feature",
                   "geometry":{"type":"LineString","coordinates":[[0,0],[10,0]]}}]})");
    REQUIRE(censeg_convert_geojson(tmp.file("r.geojson").c_str(), tmp.file("n.csv").c_str(),
                                   tmp.file("e.csv").c_str()) == CENSEG_OK);
    CHECK(slurp(tmp.file("n.csv")).find("node_id") == 0);
    CHECK(censeg_convert_geojson("/missing.geojson", tmp.file("n.csv").c_str(),
                                 tmp.file("e.csv").c_str()) == CENSEG_E_IO);
}

TEST_CASE("null-handle hygiene") {
    CHECK(censeg_series_count(nullptr) == -1);
    CHECK(censeg_graph_station_count(nullptr) == -1);
    CHECK(censeg_report_count(nullptr) == -1);
    CHECK(censeg_segment_run(nullptr, nullptr, nullptr) == CENSEG_E_INVALID);
    censeg_dataset_free(nullptr);
    censeg_series_free(nullptr);
    censeg_segmentation_free(nullptr);
    censeg_graph_free(nullptr);
    censeg_clustering_free(nullptr);
    censeg_report_free(nullptr);
    censeg_string_array_free(nullptr, 0);
}
