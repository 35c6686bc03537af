#ifndef CENSEG_ANOMALY_HPP
#define CENSEG_ANOMALY_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "censeg/cluster.hpp"
#include "censeg/ingest.hpp"
#include "censeg/station_graph.hpp"
#include "censeg/weibull.hpp"

namespace censeg {

// Concentration values of one station inside a stationary interval; censored
// measurements enter through their LOQ.
struct StationEmpirical {
    std::string station_id;
    std::vector<double> values;
};

// Exact 1-Wasserstein distance between the empirical distributions of two samples
// (L1 distance between their step CDFs on the merged support).
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct Heterogeneity {
    double w_bar = 0.0;
    bool singleton = false;
};

// Mean over ordered within-cluster station pairs of wasserstein1. A single-station
// cluster scores 0 and is flagged.
Heterogeneity cluster_heterogeneity(std::span<const StationEmpirical> cluster);

struct Intensity {
    double i_bar = 0.0;  // 1 / rate
    double rate = 0.0;
    bool degenerate = false;  // all-censored pool, rate at the box boundary
};

Intensity cluster_intensity(const CensoredSample& pooled, double sigma_hat, const FitBox& box = {});

// Pareto levels under the dominance (W_m < W_l and I_m <= I_l) or (W_m <= W_l and
// I_m < I_l); level 1 holds the maximal points, deeper levels peel recursively.
std::vector<int> pareto_levels(std::span<const std::pair<double, double>> points);

struct ClusterScore {
    std::size_t cluster_id = 0;
    std::vector<std::string> stations;
    std::size_t n_measurements = 0;
    std::size_t n_quantified = 0;
    double w_bar = 0.0;
    double i_bar = 0.0;
    int pareto_level = 0;
    bool singleton = false;
    bool degenerate = false;  // excluded from ranking unless include_degenerate
};

struct RankOptions {
    double sigma_hat = 1.0;
    FitBox box{};
    bool include_degenerate = false;
};

// Scores every cluster of the clustering over the measurements falling in the closed
// day interval, assigns Pareto levels, sorts by (level, intensity desc). Degenerate
// clusters are reported after the ranked ones with level max+1 unless included.
std::vector<ClusterScore> rank_clusters(const StationGraph& g, const Clustering& clustering,
                                        std::span<const Measurement> ms, Day start, Day end,
                                        const RankOptions& opts);

}  // namespace censeg

#endif
