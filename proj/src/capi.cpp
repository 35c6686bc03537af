#include "censeg.h"

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "censeg/anomaly.hpp"
#include "censeg/changepoint.hpp"
#include "censeg/cluster.hpp"
#include "censeg/error.hpp"
#include "censeg/ingest.hpp"
#include "censeg/pipeline.hpp"
#include "censeg/simulate.hpp"
#include "censeg/station_graph.hpp"
#include "censeg/svg.hpp"

using namespace censeg;

struct censeg_dataset {
    std::vector<Measurement> ms;
};
struct censeg_series {
    CoarseSeries s;
};
struct censeg_segmentation {
    Segmentation seg;
    std::vector<std::pair<Day, Day>> spans;
    std::size_t k = 0;
};
struct censeg_graph {
    StationGraph g;
};
struct censeg_clustering {
    StationGraph g;
    ClusterHierarchy h;
    Clustering c;
    std::size_t m_min = 0;
    std::size_t m_max = 0;
};
struct censeg_report {
    std::vector<ClusterScore> scores;
    StationGraph g;
    Clustering c;
    Day start = 0;
    Day end = 0;
    double sigma_hat = 1.0;
};

namespace {

thread_local std::string g_last_error;

censeg_status set_error(censeg_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

censeg_status from_errc(errc k) {
    switch (k) {
        case errc::io: return CENSEG_E_IO;
        case errc::parse: return CENSEG_E_PARSE;
        case errc::invalid: return CENSEG_E_INVALID;
        case errc::numeric: return CENSEG_E_NUMERIC;
        case errc::internal: return CENSEG_E_INTERNAL;
    }
    return CENSEG_E_INTERNAL;
}

template <class F>
censeg_status guarded(F&& f) {
    try {
        f();
        return CENSEG_OK;
    } catch (const error& e) {
        return set_error(from_errc(e.kind()), e.what());
    } catch (const std::exception& e) {
        return set_error(CENSEG_E_INTERNAL, e.what());
    }
}

std::ifstream open_or_throw(const char* path) {
    if (path == nullptr) fail(errc::invalid, "null path");
    std::ifstream f(path);
    if (!f) fail(errc::io, std::string("cannot open '") + path + "'");
    return f;
}

void write_or_throw(const char* path, const std::string& content) {
    if (path == nullptr) fail(errc::invalid, "null path");
    std::ofstream f(path);
    if (!f) fail(errc::io, std::string("cannot write '") + path + "'");
    f << content;
}

void require(bool cond, const char* msg) {
    if (!cond) fail(errc::invalid, msg);
}

std::vector<std::pair<Day, Day>> segment_spans(const Segmentation& seg, const CoarseSeries& s) {
    std::vector<std::pair<Day, Day>> spans;
    std::size_t prev = 0;
    for (std::size_t l = 0; l <= seg.breaks.size(); ++l) {
        const std::size_t end = l < seg.breaks.size() ? seg.breaks[l] : s.size();
        spans.emplace_back(s.entries[prev].day, s.entries[end - 1].day);
        prev = end;
    }
    return spans;
}

void copy_date(char* buf, size_t len, Day d) {
    require(buf != nullptr && len >= 11, "date buffer must hold at least 11 bytes");
    const std::string str = format_date(d);
    std::memcpy(buf, str.c_str(), str.size() + 1);
}

}  // namespace

extern "C" {

const char* censeg_version(void) { return "0.1.0"; }

const char* censeg_last_error(void) { return g_last_error.c_str(); }

/* ---- dataset ---- */

censeg_status censeg_dataset_read_csv(const char* path, censeg_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        auto f = open_or_throw(path);
        auto d = std::make_unique<censeg_dataset>();
        d->ms = parse_measurements(f);
        *out = d.release();
    });
}

censeg_status censeg_dataset_parse_csv(const char* text, censeg_dataset** out) {
    return guarded([&] {
        require(out != nullptr && text != nullptr, "null argument");
        std::istringstream in(text);
        auto d = std::make_unique<censeg_dataset>();
        d->ms = parse_measurements(in);
        *out = d.release();
    });
}

censeg_status censeg_dataset_read_csv_mapped(const char* path, const censeg_column_mapping* map,
                                             censeg_dataset** out) {
    return guarded([&] {
        require(out != nullptr && map != nullptr, "null argument");
        require(map->station_col != nullptr && map->date_col != nullptr &&
                    map->loq_col != nullptr && map->value_col != nullptr,
                "column mapping requires station/date/loq/value column names");
        ColumnMapping m;
        m.separator = map->separator != 0 ? map->separator : ',';
        m.station_col = map->station_col;
        m.date_col = map->date_col;
        m.loq_col = map->loq_col;
        m.value_col = map->value_col;
        if (map->qualifier_col != nullptr) m.qualifier_col = map->qualifier_col;
        if (map->censored_code != nullptr) m.censored_code = map->censored_code;
        m.decimal_comma = map->decimal_comma != 0;
        auto f = open_or_throw(path);
        auto d = std::make_unique<censeg_dataset>();
        d->ms = parse_measurements_mapped(f, m);
        *out = d.release();
    });
}

censeg_status censeg_dataset_write_csv(const censeg_dataset* d, const char* path) {
    return guarded([&] {
        require(d != nullptr, "null dataset");
        std::ostringstream out;
        write_measurements_csv(d->ms, out);
        write_or_throw(path, out.str());
    });
}

long censeg_dataset_count(const censeg_dataset* d) {
    return d == nullptr ? -1 : static_cast<long>(d->ms.size());
}

censeg_status censeg_dataset_active_stations(const censeg_dataset* d, const char* start_date,
                                             const char* end_date, char*** out_ids,
                                             size_t* out_n) {
    return guarded([&] {
        require(d != nullptr && out_ids != nullptr && out_n != nullptr, "null argument");
        require(start_date != nullptr && end_date != nullptr, "null date");
        const auto ids = active_stations(d->ms, parse_date(start_date), parse_date(end_date));
        char** arr = new char*[ids.size()];
        std::size_t i = 0;
        for (const auto& id : ids) {
            arr[i] = new char[id.size() + 1];
            std::memcpy(arr[i], id.c_str(), id.size() + 1);
            ++i;
        }
        *out_ids = arr;
        *out_n = ids.size();
    });
}

void censeg_dataset_free(censeg_dataset* d) { delete d; }

void censeg_string_array_free(char** items, size_t n) {
    if (items == nullptr) return;
    for (size_t i = 0; i < n; ++i) delete[] items[i];
    delete[] items;
}

/* ---- series ---- */

censeg_status censeg_series_build(const censeg_dataset* d, censeg_series** out) {
    return guarded([&] {
        require(d != nullptr && out != nullptr, "null argument");
        auto s = std::make_unique<censeg_series>();
        s->s = build_coarse_series(d->ms);
        *out = s.release();
    });
}

censeg_status censeg_series_read_csv(const char* path, censeg_series** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        auto f = open_or_throw(path);
        auto s = std::make_unique<censeg_series>();
        s->s = read_coarse_csv(f);
        *out = s.release();
    });
}

censeg_status censeg_series_write_csv(const censeg_series* s, const char* path) {
    return guarded([&] {
        require(s != nullptr, "null series");
        std::ostringstream out;
        write_coarse_csv(s->s, out);
        write_or_throw(path, out.str());
    });
}

long censeg_series_count(const censeg_series* s) {
    return s == nullptr ? -1 : static_cast<long>(s->s.size());
}

censeg_status censeg_series_quantified_fraction(const censeg_series* s, double* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        require(!s->s.empty(), "empty series");
        std::size_t q = 0;
        for (const auto& e : s->s.entries) q += e.censored ? 0 : 1;
        *out = static_cast<double>(q) / static_cast<double>(s->s.size());
    });
}

void censeg_series_free(censeg_series* s) { delete s; }

/* ---- segmentation ---- */

void censeg_segment_options_init(censeg_segment_options* opts) {
    if (opts == nullptr) return;
    const SegmentPipelineOptions d;
    opts->penalty_factor_min = d.penalty_factor_min;
    opts->penalty_factor_max = d.penalty_factor_max;
    opts->min_segment_length = static_cast<int>(d.min_segment_length);
    opts->lambda_min = d.box.lambda_min;
    opts->lambda_max = d.box.lambda_max;
    opts->sigma_min = d.box.sigma_min;
    opts->sigma_max = d.box.sigma_max;
}

censeg_status censeg_segment_run(const censeg_series* s, const censeg_segment_options* opts,
                                 censeg_segmentation** out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        SegmentPipelineOptions o;
        if (opts != nullptr) {
            o.penalty_factor_min = opts->penalty_factor_min;
            o.penalty_factor_max = opts->penalty_factor_max;
            require(opts->min_segment_length >= 1, "min_segment_length must be >= 1");
            o.min_segment_length = static_cast<std::size_t>(opts->min_segment_length);
            o.box = {opts->lambda_min, opts->lambda_max, opts->sigma_min, opts->sigma_max};
        }
        auto g = std::make_unique<censeg_segmentation>();
        g->seg = segment_pipeline(s->s, o).segmentation;
        g->spans = segment_spans(g->seg, s->s);
        g->k = s->s.size();
        *out = g.release();
    });
}

censeg_status censeg_segmentation_read_json(const char* path, censeg_segmentation** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        auto f = open_or_throw(path);
        const SegmentationInfo info = segmentation_from_json(f);
        auto g = std::make_unique<censeg_segmentation>();
        g->seg = info.segmentation;
        g->spans = info.segment_spans;
        g->k = info.k;
        *out = g.release();
    });
}

long censeg_segmentation_changepoint_count(const censeg_segmentation* g) {
    return g == nullptr ? -1 : static_cast<long>(g->seg.change_point_count());
}

double censeg_segmentation_sigma(const censeg_segmentation* g) {
    return g == nullptr ? 0.0 : g->seg.sigma_hat;
}

double censeg_segmentation_penalty(const censeg_segmentation* g) {
    return g == nullptr ? 0.0 : g->seg.penalty;
}

double censeg_segmentation_cost(const censeg_segmentation* g) {
    return g == nullptr ? 0.0 : g->seg.cost;
}

censeg_status censeg_segmentation_rate(const censeg_segmentation* g, long segment, double* out) {
    return guarded([&] {
        require(g != nullptr && out != nullptr, "null argument");
        require(segment >= 0 && static_cast<std::size_t>(segment) < g->seg.rates.size(),
                "segment index out of range");
        *out = g->seg.rates[static_cast<std::size_t>(segment)];
    });
}

censeg_status censeg_segmentation_interval(const censeg_segmentation* g, long segment,
                                           char* start_buf, size_t start_len, char* end_buf,
                                           size_t end_len) {
    return guarded([&] {
        require(g != nullptr, "null segmentation");
        require(segment >= 0 && static_cast<std::size_t>(segment) < g->spans.size(),
                "segment index out of range");
        const auto [a, b] = g->spans[static_cast<std::size_t>(segment)];
        copy_date(start_buf, start_len, a);
        copy_date(end_buf, end_len, b);
    });
}

censeg_status censeg_segmentation_write_json(const censeg_segmentation* g, const char* path) {
    return guarded([&] {
        require(g != nullptr, "null segmentation");
        write_or_throw(path, segmentation_to_json(g->seg, g->spans, g->k));
    });
}

censeg_status censeg_segmentation_plot_svg(const censeg_segmentation* g, const censeg_series* s,
                                           const char* path) {
    return guarded([&] {
        require(g != nullptr && s != nullptr, "null argument");
        write_or_throw(path, svg_segmentation_plot(s->s, g->seg));
    });
}

void censeg_segmentation_free(censeg_segmentation* g) { delete g; }

/* ---- graph ---- */

censeg_status censeg_graph_build(const char* nodes_csv_path, const char* edges_csv_path,
                                 const char* stations_csv_path, censeg_graph** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        auto nodes = open_or_throw(nodes_csv_path);
        auto edges = open_or_throw(edges_csv_path);
        auto stations = open_or_throw(stations_csv_path);
        const RiverNetwork river = read_river_network(nodes, edges);
        auto g = std::make_unique<censeg_graph>();
        g->g = StationGraph::build(read_stations_csv(stations), river);
        *out = g.release();
    });
}

censeg_status censeg_graph_induce(const censeg_graph* g, const char* const* station_ids, size_t n,
                                  censeg_graph** out) {
    return guarded([&] {
        require(g != nullptr && out != nullptr, "null argument");
        require(station_ids != nullptr || n == 0, "null id list");
        std::set<std::string> keep;
        for (size_t i = 0; i < n; ++i) {
            require(station_ids[i] != nullptr, "null station id");
            keep.insert(station_ids[i]);
        }
        auto h = std::make_unique<censeg_graph>();
        h->g = g->g.induced(keep);
        *out = h.release();
    });
}

long censeg_graph_station_count(const censeg_graph* g) {
    return g == nullptr ? -1 : static_cast<long>(g->g.station_count());
}

long censeg_graph_component_count(const censeg_graph* g) {
    return g == nullptr ? -1 : static_cast<long>(g->g.component_count());
}

censeg_status censeg_graph_write_json(const censeg_graph* g, const char* path) {
    return guarded([&] {
        require(g != nullptr, "null graph");
        write_or_throw(path, graph_to_json(g->g));
    });
}

void censeg_graph_free(censeg_graph* g) { delete g; }

/* ---- clustering ---- */

void censeg_cluster_options_init(censeg_cluster_options* opts) {
    if (opts == nullptr) return;
    opts->m_min = 0;
    opts->m_max = 0;
}

censeg_status censeg_cluster_run(const censeg_graph* g, const censeg_cluster_options* opts,
                                 censeg_clustering** out) {
    return guarded([&] {
        require(g != nullptr && out != nullptr, "null argument");
        auto c = std::make_unique<censeg_clustering>();
        c->g = g->g;
        c->h = greedy_global_hierarchy(c->g);
        std::size_t m_min = 0, m_max = 0;
        if (opts != nullptr) {
            require(opts->m_min >= 0 && opts->m_max >= 0, "negative M range");
            m_min = static_cast<std::size_t>(opts->m_min);
            m_max = static_cast<std::size_t>(opts->m_max);
        }
        const MRange range = resolve_m_range(c->g, m_min, m_max);
        c->m_min = range.m_min;
        c->m_max = range.m_max;
        c->c = select_clustering(c->h, c->m_min, c->m_max);
        *out = c.release();
    });
}

long censeg_clustering_count(const censeg_clustering* c) {
    return c == nullptr ? -1 : static_cast<long>(c->c.n_clusters);
}

double censeg_clustering_inertia(const censeg_clustering* c) {
    return c == nullptr ? 0.0 : c->c.inertia;
}

censeg_status censeg_clustering_write_csv(const censeg_clustering* c, const char* path) {
    return guarded([&] {
        require(c != nullptr, "null clustering");
        write_or_throw(path, clustering_to_csv(c->g, c->c));
    });
}

censeg_status censeg_clustering_write_json(const censeg_clustering* c, const char* path) {
    return guarded([&] {
        require(c != nullptr, "null clustering");
        write_or_throw(path, clustering_to_json(c->g, c->h, c->c, c->m_min, c->m_max));
    });
}

censeg_status censeg_clustering_plot_svg(const censeg_clustering* c, const char* path) {
    return guarded([&] {
        require(c != nullptr, "null clustering");
        std::vector<std::pair<double, double>> pts;
        std::size_t knee = 0;
        for (const auto& lvl : c->h.levels) {
            if (lvl.n_clusters < c->m_min || lvl.n_clusters > c->m_max) continue;
            if (lvl.n_clusters == c->c.n_clusters) knee = pts.size();
            pts.emplace_back(static_cast<double>(lvl.n_clusters), lvl.inertia);
        }
        write_or_throw(path, svg_elbow_plot(pts, knee, "clusters M", "inertia W"));
    });
}

void censeg_clustering_free(censeg_clustering* c) { delete c; }

/* ---- report ---- */

censeg_status censeg_rank_run(const censeg_dataset* d, const censeg_clustering* c,
                              const char* start_date, const char* end_date, double sigma_hat,
                              censeg_report** out) {
    return guarded([&] {
        require(d != nullptr && c != nullptr && out != nullptr, "null argument");
        require(start_date != nullptr && end_date != nullptr, "null date");
        auto r = std::make_unique<censeg_report>();
        r->start = parse_date(start_date);
        r->end = parse_date(end_date);
        r->sigma_hat = sigma_hat;
        r->g = c->g;
        r->c = c->c;
        RankOptions opts;
        opts.sigma_hat = sigma_hat;
        r->scores = rank_clusters(r->g, r->c, d->ms, r->start, r->end, opts);
        *out = r.release();
    });
}

long censeg_report_count(const censeg_report* r) {
    return r == nullptr ? -1 : static_cast<long>(r->scores.size());
}

censeg_status censeg_report_score(const censeg_report* r, long index, double* w_bar, double* i_bar,
                                  long* pareto_level) {
    return guarded([&] {
        require(r != nullptr, "null report");
        require(index >= 0 && static_cast<std::size_t>(index) < r->scores.size(),
                "score index out of range");
        const auto& s = r->scores[static_cast<std::size_t>(index)];
        if (w_bar != nullptr) *w_bar = s.w_bar;
        if (i_bar != nullptr) *i_bar = s.i_bar;
        if (pareto_level != nullptr) *pareto_level = s.pareto_level;
    });
}

censeg_status censeg_report_write_json(const censeg_report* r, const char* path) {
    return guarded([&] {
        require(r != nullptr, "null report");
        write_or_throw(path, report_to_json(r->scores, r->start, r->end, r->sigma_hat));
    });
}

censeg_status censeg_report_write_csv(const censeg_report* r, const char* path) {
    return guarded([&] {
        require(r != nullptr, "null report");
        write_or_throw(path, report_to_csv(r->scores));
    });
}

censeg_status censeg_report_plot_svg(const censeg_report* r, const char* path) {
    return guarded([&] {
        require(r != nullptr, "null report");
        write_or_throw(path, svg_pareto_plot(r->scores));
    });
}

censeg_status censeg_report_plot_map_svg(const censeg_report* r, const char* path) {
    return guarded([&] {
        require(r != nullptr, "null report");
        write_or_throw(path, svg_station_map(r->g, r->c, r->scores));
    });
}

void censeg_report_free(censeg_report* r) { delete r; }

/* ---- pipeline entry points ---- */

censeg_status censeg_simulate_file(const char* spec_ini_path, const char* out_dir) {
    return guarded([&] {
        require(out_dir != nullptr, "null output directory");
        auto f = open_or_throw(spec_ini_path);
        write_simulation(parse_simulation_spec(f), out_dir);
    });
}

censeg_status censeg_pipeline_run_file(const char* config_ini_path, const char* out_dir_override,
                                       long interval_override) {
    return guarded([&] {
        require(config_ini_path != nullptr, "null config path");
        PipelineConfig cfg = load_pipeline_config(config_ini_path);
        if (out_dir_override != nullptr) cfg.output_dir = out_dir_override;
        if (interval_override >= 0) {
            cfg.interval = interval_override;
            cfg.interval_date.reset();
        }
        run_pipeline(cfg);
    });
}

censeg_status censeg_convert_geojson(const char* geojson_path, const char* nodes_csv_path,
                                     const char* edges_csv_path) {
    return guarded([&] {
        auto in = open_or_throw(geojson_path);
        std::ostringstream nodes, edges;
        convert_geojson(in, nodes, edges);
        write_or_throw(nodes_csv_path, nodes.str());
        write_or_throw(edges_csv_path, edges.str());
    });
}

}  // extern "C"
