// censeg command-line front end. Talks to the library exclusively through the
// C API in censeg.h.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "censeg.h"

namespace {

int exit_code_for(censeg_status status) {
    switch (status) {
        case CENSEG_OK: return 0;
        case CENSEG_E_IO: return 2;
        default: return 1;
    }
}

int check(censeg_status status, const char* stage) {
    if (status == CENSEG_OK) return 0;
    std::fprintf(stderr, "censeg: %s: %s\n", stage, censeg_last_error());
    return exit_code_for(status);
}

struct Handles {
    censeg_dataset* dataset = nullptr;
    censeg_series* series = nullptr;
    censeg_segmentation* segmentation = nullptr;
    censeg_graph* graph = nullptr;
    censeg_graph* induced = nullptr;
    censeg_clustering* clustering = nullptr;
    censeg_report* report = nullptr;

    ~Handles() {
        censeg_report_free(report);
        censeg_clustering_free(clustering);
        censeg_graph_free(induced);
        censeg_graph_free(graph);
        censeg_segmentation_free(segmentation);
        censeg_series_free(series);
        censeg_dataset_free(dataset);
    }
};

struct SpatialInputs {
    std::string measurements;
    std::string river_nodes;
    std::string river_edges;
    std::string stations;
    std::string segmentation_json;
    long interval = 0;
    std::string start_date;
    std::string end_date;
    long m_min = 0;
    long m_max = 0;
};

void add_spatial_options(CLI::App* cmd, SpatialInputs& in, bool with_m_range) {
    cmd->add_option("--measurements", in.measurements, "measurements CSV")->required();
    cmd->add_option("--river-nodes", in.river_nodes, "river node CSV (node_id,x_m,y_m)")->required();
    cmd->add_option("--river-edges", in.river_edges, "river edge CSV (node_a,node_b,length_m)")->required();
    cmd->add_option("--stations", in.stations, "station CSV (station_id,x_m,y_m)")->required();
    cmd->add_option("--segmentation", in.segmentation_json,
                    "segmentation.json from 'segment' (defines the stationary intervals)");
    cmd->add_option("--interval", in.interval, "stationary segment index (default 0)");
    cmd->add_option("--start", in.start_date, "explicit interval start (overrides --segmentation)");
    cmd->add_option("--end", in.end_date, "explicit interval end");
    if (with_m_range) {
        cmd->add_option("--m-min", in.m_min, "smallest cluster count (0 = component count)");
        cmd->add_option("--m-max", in.m_max, "largest cluster count (0 = min(35, n-1))");
    }
}

// Shared front half of `cluster` and `rank`: resolve the interval, induce the
// active-station subgraph, run the hierarchy selection.
int prepare_spatial(const SpatialInputs& in, Handles& h, std::string& start, std::string& end,
                    double& sigma_hat) {
    if (int rc = check(censeg_dataset_read_csv(in.measurements.c_str(), &h.dataset), "measurements"))
        return rc;
    sigma_hat = 1.0;
    if (!in.start_date.empty() && !in.end_date.empty()) {
        start = in.start_date;
        end = in.end_date;
        if (!in.segmentation_json.empty()) {
            if (int rc = check(censeg_segmentation_read_json(in.segmentation_json.c_str(),
                                                             &h.segmentation),
                               "segmentation"))
                return rc;
            sigma_hat = censeg_segmentation_sigma(h.segmentation);
        }
    } else {
        if (in.segmentation_json.empty()) {
            std::fprintf(stderr, "censeg: need --segmentation with --interval, or --start/--end\n");
            return 64;
        }
        if (int rc = check(censeg_segmentation_read_json(in.segmentation_json.c_str(),
                                                         &h.segmentation),
                           "segmentation"))
            return rc;
        sigma_hat = censeg_segmentation_sigma(h.segmentation);
        char sbuf[16], ebuf[16];
        if (int rc = check(censeg_segmentation_interval(h.segmentation, in.interval, sbuf,
                                                        sizeof sbuf, ebuf, sizeof ebuf),
                           "interval"))
            return rc;
        start = sbuf;
        end = ebuf;
    }

    char** ids = nullptr;
    size_t n_ids = 0;
    if (int rc = check(censeg_dataset_active_stations(h.dataset, start.c_str(), end.c_str(), &ids,
                                                      &n_ids),
                       "active stations"))
        return rc;
    if (n_ids == 0) {
        censeg_string_array_free(ids, n_ids);
        std::fprintf(stderr, "censeg: no active station in [%s, %s]\n", start.c_str(), end.c_str());
        return 1;
    }
    int rc = check(censeg_graph_build(in.river_nodes.c_str(), in.river_edges.c_str(),
                                      in.stations.c_str(), &h.graph),
                   "station graph");
    if (rc == 0)
        rc = check(censeg_graph_induce(h.graph, ids, n_ids, &h.induced), "induced subgraph");
    censeg_string_array_free(ids, n_ids);
    if (rc) return rc;

    censeg_cluster_options copts;
    censeg_cluster_options_init(&copts);
    copts.m_min = in.m_min;
    copts.m_max = in.m_max;
    return check(censeg_cluster_run(h.induced, &copts, &h.clustering), "clustering");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatio-temporal collective anomaly detection in left-censored "
                 "concentration monitoring data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", censeg_version());

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build the coarse daily-maximum series");
    std::string ingest_in, ingest_out = "coarse.csv";
    ingest->add_option("--input", ingest_in, "measurements CSV")->required();
    ingest->add_option("--output", ingest_out, "coarse series CSV");
    std::string col_station, col_date, col_loq, col_value, col_qual, censored_code, sep = ",";
    std::string measurements_out;
    bool decimal_comma = false, naiade = false;
    ingest->add_option("--measurements-out", measurements_out,
                       "also write the normalized measurements CSV (native schema)");
    ingest->add_flag("--naiade", naiade,
                     "preset for French surface-water quality exports (';' separator, "
                     "CdStationMesureEauxSurface/DatePrel/LqAna/RsAna columns, CdRqAna 10 = "
                     "below LOQ, decimal commas)");
    ingest->add_option("--sep", sep, "field separator (one character)");
    ingest->add_option("--station-col", col_station, "station id column name");
    ingest->add_option("--date-col", col_date, "sampling date column name");
    ingest->add_option("--loq-col", col_loq, "quantification limit column name");
    ingest->add_option("--value-col", col_value, "measured value column name");
    ingest->add_option("--qualifier-col", col_qual, "qualifier column marking censored rows");
    ingest->add_option("--censored-code", censored_code, "qualifier value meaning below LOQ");
    ingest->add_flag("--decimal-comma", decimal_comma, "numeric fields use decimal commas");

    // segment
    auto* segment = app.add_subcommand("segment", "Temporal change-point segmentation");
    std::string seg_in, seg_out = "segmentation.json", seg_svg;
    censeg_segment_options sopts;
    censeg_segment_options_init(&sopts);
    segment->add_option("--input", seg_in, "coarse series CSV (from 'ingest')")->required();
    segment->add_option("--output", seg_out, "segmentation JSON");
    segment->add_option("--svg", seg_svg, "series step plot with break lines");
    segment->add_option("--penalty-factor-min", sopts.penalty_factor_min, "penalty = factor*log K");
    segment->add_option("--penalty-factor-max", sopts.penalty_factor_max, "penalty = factor*log K");
    segment->add_option("--min-seg-len", sopts.min_segment_length, "minimum segment length");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Spatial clustering of active stations");
    SpatialInputs cl_in;
    std::string cl_csv = "clustering.csv", cl_json, cl_svg;
    add_spatial_options(cluster, cl_in, true);
    cluster->add_option("--output", cl_csv, "clustering CSV (station_id,cluster_id)");
    cluster->add_option("--json", cl_json, "clustering JSON with per-level inertias");
    cluster->add_option("--svg", cl_svg, "inertia-vs-M elbow plot");

    // rank
    auto* rank = app.add_subcommand("rank", "Pareto anomaly ranking of spatial clusters");
    SpatialInputs rk_in;
    std::string rk_json = "anomaly_report.json", rk_csv, rk_svg, rk_map;
    double rk_sigma = 0.0;
    add_spatial_options(rank, rk_in, true);
    rank->add_option("--sigma", rk_sigma, "global shape (default: from --segmentation)");
    rank->add_option("--output", rk_json, "anomaly report JSON");
    rank->add_option("--csv", rk_csv, "anomaly report CSV");
    rank->add_option("--svg", rk_svg, "(W,I) Pareto scatter");
    rank->add_option("--map", rk_map, "station map colored by level");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic campaign");
    std::string sim_spec, sim_out = ".";
    simulate->add_option("--spec", sim_spec, "simulation spec INI")->required();
    simulate->add_option("--out", sim_out, "output directory");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Run the full pipeline from a config");
    std::string pl_cfg, pl_out;
    long pl_interval = -1;
    pipeline->add_option("--config", pl_cfg, "pipeline config INI")->required();
    pipeline->add_option("--out", pl_out, "override output directory");
    pipeline->add_option("--interval", pl_interval, "override stationary segment index");

    // convert-geojson
    auto* convert = app.add_subcommand("convert-geojson", "River CSVs from GeoJSON LineStrings");
    std::string gj_in, gj_nodes = "river_nodes.csv", gj_edges = "river_edges.csv";
    convert->add_option("--input", gj_in, "GeoJSON file")->required();
    convert->add_option("--nodes", gj_nodes, "output node CSV");
    convert->add_option("--edges", gj_edges, "output edge CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::fputs(app.help().c_str(), stderr);
        return 64;
    }

    if (ingest->parsed()) {
        Handles h;
        if (naiade) {
            if (ingest->count("--sep") == 0) sep = ";";
            if (col_station.empty()) col_station = "CdStationMesureEauxSurface";
            if (col_date.empty()) col_date = "DatePrel";
            if (col_loq.empty()) col_loq = "LqAna";
            if (col_value.empty()) col_value = "RsAna";
            if (col_qual.empty()) col_qual = "CdRqAna";
            if (censored_code.empty()) censored_code = "10";
            decimal_comma = true;
        }
        const bool mapped = naiade || !col_station.empty() || !col_date.empty() ||
                            !col_loq.empty() || !col_value.empty() || !col_qual.empty() ||
                            sep != "," || decimal_comma;
        if (mapped) {
            if (sep.size() != 1) {
                std::fprintf(stderr, "censeg: --sep must be a single character\n");
                return 64;
            }
            censeg_column_mapping map{};
            map.separator = sep[0];
            map.station_col = col_station.empty() ? "station_id" : col_station.c_str();
            map.date_col = col_date.empty() ? "date" : col_date.c_str();
            map.loq_col = col_loq.empty() ? "loq" : col_loq.c_str();
            map.value_col = col_value.empty() ? "value" : col_value.c_str();
            map.qualifier_col = col_qual.empty() ? nullptr : col_qual.c_str();
            map.censored_code = censored_code.empty() ? nullptr : censored_code.c_str();
            map.decimal_comma = decimal_comma ? 1 : 0;
            if (int rc = check(censeg_dataset_read_csv_mapped(ingest_in.c_str(), &map, &h.dataset),
                               "measurements"))
                return rc;
        } else if (int rc = check(censeg_dataset_read_csv(ingest_in.c_str(), &h.dataset),
                                  "measurements")) {
            return rc;
        }
        if (int rc = check(censeg_series_build(h.dataset, &h.series), "coarse series")) return rc;
        if (int rc = check(censeg_series_write_csv(h.series, ingest_out.c_str()), "write")) return rc;
        if (!measurements_out.empty())
            if (int rc = check(censeg_dataset_write_csv(h.dataset, measurements_out.c_str()),
                               "write"))
                return rc;
        std::printf("wrote %s (%ld days from %ld measurements)\n", ingest_out.c_str(),
                    censeg_series_count(h.series), censeg_dataset_count(h.dataset));
        return 0;
    }

    if (segment->parsed()) {
        Handles h;
        if (int rc = check(censeg_series_read_csv(seg_in.c_str(), &h.series), "coarse series"))
            return rc;
        if (int rc = check(censeg_segment_run(h.series, &sopts, &h.segmentation), "segmentation"))
            return rc;
        if (int rc = check(censeg_segmentation_write_json(h.segmentation, seg_out.c_str()), "write"))
            return rc;
        if (!seg_svg.empty())
            if (int rc = check(censeg_segmentation_plot_svg(h.segmentation, h.series,
                                                            seg_svg.c_str()),
                               "plot"))
                return rc;
        std::printf("wrote %s (%ld change-points, sigma_hat=%.4g, penalty=%.4g)\n", seg_out.c_str(),
                    censeg_segmentation_changepoint_count(h.segmentation),
                    censeg_segmentation_sigma(h.segmentation),
                    censeg_segmentation_penalty(h.segmentation));
        return 0;
    }

    if (cluster->parsed()) {
        Handles h;
        std::string start, end;
        double sigma = 1.0;
        if (int rc = prepare_spatial(cl_in, h, start, end, sigma)) return rc;
        if (int rc = check(censeg_clustering_write_csv(h.clustering, cl_csv.c_str()), "write"))
            return rc;
        if (!cl_json.empty())
            if (int rc = check(censeg_clustering_write_json(h.clustering, cl_json.c_str()), "write"))
                return rc;
        if (!cl_svg.empty())
            if (int rc = check(censeg_clustering_plot_svg(h.clustering, cl_svg.c_str()), "plot"))
                return rc;
        std::printf("wrote %s (%ld clusters over [%s, %s])\n", cl_csv.c_str(),
                    censeg_clustering_count(h.clustering), start.c_str(), end.c_str());
        return 0;
    }

    if (rank->parsed()) {
        Handles h;
        std::string start, end;
        double sigma = 1.0;
        if (int rc = prepare_spatial(rk_in, h, start, end, sigma)) return rc;
        if (rk_sigma > 0.0)
            sigma = rk_sigma;
        else if (h.segmentation == nullptr)
            std::fprintf(stderr, "censeg: no --segmentation or --sigma given; using shape 1.0\n");
        if (int rc = check(censeg_rank_run(h.dataset, h.clustering, start.c_str(), end.c_str(),
                                           sigma, &h.report),
                           "ranking"))
            return rc;
        if (int rc = check(censeg_report_write_json(h.report, rk_json.c_str()), "write")) return rc;
        if (!rk_csv.empty())
            if (int rc = check(censeg_report_write_csv(h.report, rk_csv.c_str()), "write")) return rc;
        if (!rk_svg.empty())
            if (int rc = check(censeg_report_plot_svg(h.report, rk_svg.c_str()), "plot")) return rc;
        if (!rk_map.empty())
            if (int rc = check(censeg_report_plot_map_svg(h.report, rk_map.c_str()), "plot"))
                return rc;
        std::printf("wrote %s (%ld clusters over [%s, %s])\n", rk_json.c_str(),
                    censeg_report_count(h.report), start.c_str(), end.c_str());
        return 0;
    }

    if (simulate->parsed()) {
        if (int rc = check(censeg_simulate_file(sim_spec.c_str(), sim_out.c_str()), "simulate"))
            return rc;
        std::printf("wrote synthetic campaign to %s\n", sim_out.c_str());
        return 0;
    }

    if (pipeline->parsed()) {
        if (int rc = check(censeg_pipeline_run_file(pl_cfg.c_str(),
                                                    pl_out.empty() ? nullptr : pl_out.c_str(),
                                                    pl_interval),
                           "pipeline"))
            return rc;
        std::printf("pipeline complete\n");
        return 0;
    }

    if (convert->parsed()) {
        if (int rc = check(censeg_convert_geojson(gj_in.c_str(), gj_nodes.c_str(),
                                                  gj_edges.c_str()),
                           "convert"))
            return rc;
        std::printf("wrote %s and %s\n", gj_nodes.c_str(), gj_edges.c_str());
        return 0;
    }

    return 64;
}
