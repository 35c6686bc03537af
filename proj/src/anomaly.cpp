#include "censeg/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "censeg/error.hpp"

namespace censeg {

double wasserstein1(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) fail(errc::invalid, "wasserstein1: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double wa = 1.0 / static_cast<double>(sa.size());
    const double wb = 1.0 / static_cast<double>(sb.size());

    // sweep the merged support, integrating |F_a - F_b| over each gap
    double fa = 0.0, fb = 0.0, total = 0.0;
    std::size_t i = 0, j = 0;
    double prev = 0.0;
    bool first = true;
    while (i < sa.size() || j < sb.size()) {
        const double x = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
        if (!first) total += std::fabs(fa - fb) * (x - prev);
        while (i < sa.size() && sa[i] == x) {
            fa += wa;
            ++i;
        }
        while (j < sb.size() && sb[j] == x) {
            fb += wb;
            ++j;
        }
        prev = x;
        first = false;
    }
    return total;
}

Heterogeneity cluster_heterogeneity(std::span<const StationEmpirical> cluster) {
    if (cluster.empty()) fail(errc::invalid, "cluster_heterogeneity: empty cluster");
    for (const auto& s : cluster)
        if (s.values.empty())
            fail(errc::invalid, "cluster_heterogeneity: station '" + s.station_id + "' has no data");
    if (cluster.size() == 1) return {0.0, true};
    double sum = 0.0;
    for (std::size_t i = 0; i < cluster.size(); ++i)
        for (std::size_t j = i + 1; j < cluster.size(); ++j)
            sum += 2.0 * wasserstein1(cluster[i].values, cluster[j].values);
    const double n = static_cast<double>(cluster.size());
    return {sum / (n * (n - 1.0)), false};
}

Intensity cluster_intensity(const CensoredSample& pooled, double sigma_hat, const FitBox& box) {
    const RateFit fit = fit_rate_fixed_shape(pooled, sigma_hat, box);
    return {1.0 / fit.rate, fit.rate, fit.degenerate};
}

std::vector<int> pareto_levels(std::span<const std::pair<double, double>> points) {
    const std::size_t n = points.size();
    std::vector<int> level(n, 0);
    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);

    int current = 0;
    while (!remaining.empty()) {
        ++current;
        // sort by W descending; equal-W groups share a strict-I maximum check
        std::sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
            if (points[a].first != points[b].first) return points[a].first > points[b].first;
            return points[a].second > points[b].second;
        });
        std::vector<std::size_t> next;
        double max_i_strict = -std::numeric_limits<double>::infinity();
        std::size_t g = 0;
        while (g < remaining.size()) {
            std::size_t h = g;
            double group_max = -std::numeric_limits<double>::infinity();
            while (h < remaining.size() &&
                   points[remaining[h]].first == points[remaining[g]].first) {
                group_max = std::max(group_max, points[remaining[h]].second);
                ++h;
            }
            for (std::size_t k = g; k < h; ++k) {
                const std::size_t idx = remaining[k];
                const double ii = points[idx].second;
                if (ii == group_max && ii > max_i_strict)
                    level[idx] = current;
                else
                    next.push_back(idx);
            }
            max_i_strict = std::max(max_i_strict, group_max);
            g = h;
        }
        remaining = std::move(next);
    }
    return level;
}

std::vector<ClusterScore> rank_clusters(const StationGraph& g, const Clustering& clustering,
                                        std::span<const Measurement> ms, Day start, Day end,
                                        const RankOptions& opts) {
    if (clustering.assignment.size() != g.station_count())
        fail(errc::invalid, "rank_clusters: clustering does not match graph");
    if (start > end) fail(errc::invalid, "rank_clusters: interval start after end");

    std::vector<StationEmpirical> per_station(g.station_count());
    std::vector<CensoredSample> pools(clustering.n_clusters);
    std::vector<std::size_t> n_quantified(clustering.n_clusters, 0);
    std::unordered_map<std::string, std::size_t> station_index;
    for (std::size_t i = 0; i < g.station_count(); ++i) {
        per_station[i].station_id = g.stations()[i].id;
        station_index.emplace(g.stations()[i].id, i);
    }

    for (const auto& m : ms) {
        if (m.day < start || m.day > end) continue;
        const auto it = station_index.find(m.station_id);
        if (it == station_index.end()) continue;  // station outside the (induced) graph
        const std::size_t idx = it->second;
        const std::size_t c = clustering.assignment[idx];
        if (m.value) {
            per_station[idx].values.push_back(*m.value);
            pools[c].push_uncensored(*m.value, m.loq);
            ++n_quantified[c];
        } else {
            per_station[idx].values.push_back(m.loq);
            pools[c].push_censored(m.loq);
        }
    }

    std::vector<ClusterScore> scores(clustering.n_clusters);
    for (std::size_t c = 0; c < clustering.n_clusters; ++c) {
        std::vector<StationEmpirical> members;
        for (std::size_t i = 0; i < g.station_count(); ++i)
            if (clustering.assignment[i] == c) {
                if (per_station[i].values.empty())
                    fail(errc::invalid, "rank_clusters: station '" + per_station[i].station_id +
                                            "' has no measurement in the interval");
                members.push_back(per_station[i]);
                scores[c].stations.push_back(per_station[i].station_id);
            }
        const Heterogeneity het = cluster_heterogeneity(members);
        const Intensity inten = cluster_intensity(pools[c], opts.sigma_hat, opts.box);
        scores[c].cluster_id = c;
        scores[c].n_measurements = pools[c].size();
        scores[c].n_quantified = n_quantified[c];
        scores[c].w_bar = het.w_bar;
        scores[c].i_bar = inten.i_bar;
        scores[c].singleton = het.singleton;
        scores[c].degenerate = inten.degenerate;
    }

    // Pareto levels over the ranked subset; degenerate intensities are box artifacts
    // and sit below every ranked level unless explicitly included.
    std::vector<std::size_t> ranked;
    for (std::size_t c = 0; c < scores.size(); ++c)
        if (opts.include_degenerate || !scores[c].degenerate) ranked.push_back(c);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(ranked.size());
    for (const std::size_t c : ranked) pts.emplace_back(scores[c].w_bar, scores[c].i_bar);
    const std::vector<int> levels = pareto_levels(pts);
    int max_level = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        scores[ranked[k]].pareto_level = levels[k];
        max_level = std::max(max_level, levels[k]);
    }
    for (auto& s : scores)
        if (s.pareto_level == 0) s.pareto_level = max_level + 1;

    std::sort(scores.begin(), scores.end(), [](const ClusterScore& a, const ClusterScore& b) {
        if (a.pareto_level != b.pareto_level) return a.pareto_level < b.pareto_level;
        if (a.i_bar != b.i_bar) return a.i_bar > b.i_bar;
        return a.cluster_id < b.cluster_id;
    });
    return scores;
}

}  // namespace censeg
