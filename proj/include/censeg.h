/*
 * censeg C API: spatio-temporal collective anomaly detection for left-censored
 * concentration monitoring data.
 *
 * All functions return censeg_status; on failure censeg_last_error() carries a
 * thread-local message. Handles are opaque and owned by the caller through the
 * matching *_free function. Dates are "YYYY-MM-DD" strings.
 */
#ifndef CENSEG_H
#define CENSEG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum censeg_status {
    CENSEG_OK = 0,
    CENSEG_E_IO = 1,       /* missing/unreadable/unwritable file */
    CENSEG_E_PARSE = 2,    /* malformed input text */
    CENSEG_E_INVALID = 3,  /* precondition or invariant violation */
    CENSEG_E_NUMERIC = 4,  /* numerical failure */
    CENSEG_E_INTERNAL = 5
} censeg_status;

typedef struct censeg_dataset censeg_dataset;           /* raw measurements */
typedef struct censeg_series censeg_series;             /* coarse daily-max series */
typedef struct censeg_segmentation censeg_segmentation; /* temporal segmentation */
typedef struct censeg_graph censeg_graph;               /* station graph */
typedef struct censeg_clustering censeg_clustering;     /* spatial clustering */
typedef struct censeg_report censeg_report;             /* ranked cluster scores */

const char* censeg_version(void);
const char* censeg_last_error(void);

/* ---- measurements ------------------------------------------------------ */

censeg_status censeg_dataset_read_csv(const char* path, censeg_dataset** out);
censeg_status censeg_dataset_parse_csv(const char* text, censeg_dataset** out);

/* Column-mapped ingestion for third-party exports. qualifier_col/censored_code may
 * be NULL (censoring then means an empty value field). */
typedef struct censeg_column_mapping {
    char separator;
    const char* station_col;
    const char* date_col;
    const char* loq_col;
    const char* value_col;
    const char* qualifier_col;
    const char* censored_code;
    int decimal_comma;
} censeg_column_mapping;

censeg_status censeg_dataset_read_csv_mapped(const char* path, const censeg_column_mapping* map,
                                             censeg_dataset** out);
/* native schema: station_id,date,loq,value */
censeg_status censeg_dataset_write_csv(const censeg_dataset* d, const char* path);
long censeg_dataset_count(const censeg_dataset* d);
/* ids of stations with at least one measurement in the closed date interval;
 * free with censeg_string_array_free */
censeg_status censeg_dataset_active_stations(const censeg_dataset* d, const char* start_date,
                                             const char* end_date, char*** out_ids, size_t* out_n);
void censeg_dataset_free(censeg_dataset* d);
void censeg_string_array_free(char** items, size_t n);

/* ---- coarse series ----------------------------------------------------- */

censeg_status censeg_series_build(const censeg_dataset* d, censeg_series** out);
censeg_status censeg_series_read_csv(const char* path, censeg_series** out);
censeg_status censeg_series_write_csv(const censeg_series* s, const char* path);
long censeg_series_count(const censeg_series* s);
/* fraction of coarse entries with a quantified maximum */
censeg_status censeg_series_quantified_fraction(const censeg_series* s, double* out);
void censeg_series_free(censeg_series* s);

/* ---- temporal segmentation --------------------------------------------- */

typedef struct censeg_segment_options {
    double penalty_factor_min; /* times log K, default 0.2 */
    double penalty_factor_max; /* times log K, default 5.0 */
    int min_segment_length;    /* default 2 */
    double lambda_min, lambda_max; /* rate feasibility box */
    double sigma_min, sigma_max;   /* shape feasibility box */
} censeg_segment_options;

void censeg_segment_options_init(censeg_segment_options* opts);

censeg_status censeg_segment_run(const censeg_series* s, const censeg_segment_options* opts,
                                 censeg_segmentation** out);
censeg_status censeg_segmentation_read_json(const char* path, censeg_segmentation** out);
long censeg_segmentation_changepoint_count(const censeg_segmentation* g);
double censeg_segmentation_sigma(const censeg_segmentation* g);
double censeg_segmentation_penalty(const censeg_segmentation* g);
double censeg_segmentation_cost(const censeg_segmentation* g);
censeg_status censeg_segmentation_rate(const censeg_segmentation* g, long segment, double* out);
/* closed date span of one stationary segment (segment in [0, changepoints]) */
censeg_status censeg_segmentation_interval(const censeg_segmentation* g, long segment,
                                           char* start_buf, size_t start_len, char* end_buf,
                                           size_t end_len);
censeg_status censeg_segmentation_write_json(const censeg_segmentation* g, const char* path);
censeg_status censeg_segmentation_plot_svg(const censeg_segmentation* g, const censeg_series* s,
                                           const char* path);
void censeg_segmentation_free(censeg_segmentation* g);

/* ---- station graph ------------------------------------------------------ */

censeg_status censeg_graph_build(const char* nodes_csv_path, const char* edges_csv_path,
                                 const char* stations_csv_path, censeg_graph** out);
censeg_status censeg_graph_induce(const censeg_graph* g, const char* const* station_ids, size_t n,
                                  censeg_graph** out);
long censeg_graph_station_count(const censeg_graph* g);
long censeg_graph_component_count(const censeg_graph* g);
censeg_status censeg_graph_write_json(const censeg_graph* g, const char* path);
void censeg_graph_free(censeg_graph* g);

/* ---- spatial clustering -------------------------------------------------- */

typedef struct censeg_cluster_options {
    long m_min; /* 0 = component count */
    long m_max; /* 0 = min(35, n-1) */
} censeg_cluster_options;

void censeg_cluster_options_init(censeg_cluster_options* opts);

censeg_status censeg_cluster_run(const censeg_graph* g, const censeg_cluster_options* opts,
                                 censeg_clustering** out);
long censeg_clustering_count(const censeg_clustering* c);
double censeg_clustering_inertia(const censeg_clustering* c);
censeg_status censeg_clustering_write_csv(const censeg_clustering* c, const char* path);
censeg_status censeg_clustering_write_json(const censeg_clustering* c, const char* path);
censeg_status censeg_clustering_plot_svg(const censeg_clustering* c, const char* path);
void censeg_clustering_free(censeg_clustering* c);

/* ---- anomaly ranking ----------------------------------------------------- */

censeg_status censeg_rank_run(const censeg_dataset* d, const censeg_clustering* c,
                              const char* start_date, const char* end_date, double sigma_hat,
                              censeg_report** out);
long censeg_report_count(const censeg_report* r);
censeg_status censeg_report_score(const censeg_report* r, long index, double* w_bar, double* i_bar,
                                  long* pareto_level);
censeg_status censeg_report_write_json(const censeg_report* r, const char* path);
censeg_status censeg_report_write_csv(const censeg_report* r, const char* path);
censeg_status censeg_report_plot_svg(const censeg_report* r, const char* path);
censeg_status censeg_report_plot_map_svg(const censeg_report* r, const char* path);
void censeg_report_free(censeg_report* r);

/* ---- whole-pipeline entry points ---------------------------------------- */

/* Generates a synthetic campaign; writes measurements.csv, river_nodes.csv,
 * river_edges.csv, stations.csv, truth.json and a ready pipeline.ini. */
censeg_status censeg_simulate_file(const char* spec_ini_path, const char* out_dir);

/* Runs ingest -> segmentation -> spatial stage -> ranking from an INI config.
 * out_dir_override and interval_override (< 0 keeps the config value) are optional. */
censeg_status censeg_pipeline_run_file(const char* config_ini_path, const char* out_dir_override,
                                       long interval_override);

/* rivers-from-GeoJSON utility (LineString / MultiLineString collections). */
censeg_status censeg_convert_geojson(const char* geojson_path, const char* nodes_csv_path,
                                     const char* edges_csv_path);

#ifdef __cplusplus
}
#endif

#endif /* CENSEG_H */
