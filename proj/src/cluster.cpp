#include "censeg/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "censeg/changepoint.hpp"
#include "censeg/error.hpp"

namespace censeg {

double inertia(const StationGraph& g, std::span<const std::size_t> assignment,
               std::size_t n_clusters) {
    if (assignment.size() != g.station_count())
        fail(errc::invalid, "inertia: assignment size mismatch");
    std::vector<std::vector<std::size_t>> clusters(n_clusters);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= n_clusters) fail(errc::invalid, "inertia: cluster id out of range");
        clusters[assignment[i]].push_back(i);
    }
    double total = 0.0;
    for (const auto& members : clusters) {
        if (members.empty()) fail(errc::invalid, "inertia: empty cluster");
        double within = 0.0;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const double d = g.distance(members[a], members[b]);  // throws across components
                within += 2.0 * d * d;                                // ordered pairs
            }
        total += within / static_cast<double>(members.size());
    }
    return total;
}

Dendrogram ward_hierarchy(const DistanceMatrix& dist) {
    const std::size_t n = dist.n;
    Dendrogram out;
    out.n_leaves = n;
    if (n <= 1) return out;

    // Pair values live in a (2n-1)^2 working matrix indexed by cluster id.
    const std::size_t total = 2 * n - 1;
    std::vector<double> m(total * total, 0.0);
    const auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * total + j]; };
    std::vector<double> sizes(total, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sizes[i] = 1.0;
        for (std::size_t j = 0; j < n; ++j) at(i, j) = dist.at(i, j) * dist.at(i, j);
    }

    std::vector<std::size_t> alive(n);
    std::iota(alive.begin(), alive.end(), 0);

    for (std::size_t step = 0; step < n - 1; ++step) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < alive.size(); ++a)
            for (std::size_t b = a + 1; b < alive.size(); ++b) {
                const double v = at(alive[a], alive[b]);
                if (v < best) {
                    best = v;
                    bi = a;
                    bj = b;
                }
            }
        const std::size_t i = alive[bi];
        const std::size_t j = alive[bj];
        const std::size_t merged = n + step;
        out.merges.push_back({i, j, best, std::sqrt(best)});

        for (const std::size_t k : alive) {
            if (k == i || k == j) continue;
            const double v = ((sizes[i] + sizes[k]) * at(i, k) + (sizes[j] + sizes[k]) * at(j, k) -
                              sizes[k] * best) /
                             (sizes[i] + sizes[j] + sizes[k]);
            at(merged, k) = v;
            at(k, merged) = v;
        }
        sizes[merged] = sizes[i] + sizes[j];
        alive.erase(alive.begin() + bj);
        alive[bi] = merged;
    }
    return out;
}

namespace {

// Clusters of one component after keeping the first n_merges merges, labelled by the
// smallest contained leaf slot.
std::vector<std::size_t> cut_assignment(const Dendrogram& d, std::size_t n_merges) {
    const std::size_t n = d.n_leaves;
    std::vector<std::size_t> owner(2 * n - 1);
    std::iota(owner.begin(), owner.end(), 0);
    const auto find = [&](std::size_t x) {
        while (owner[x] != x) x = owner[x] = owner[owner[x]];
        return x;
    };
    for (std::size_t k = 0; k < n_merges; ++k) {
        const std::size_t root = n + k;
        owner[find(d.merges[k].left)] = root;
        owner[find(d.merges[k].right)] = root;
    }
    std::vector<std::size_t> rep(2 * n - 1, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> assignment(n);
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        const std::size_t root = find(leaf);
        if (rep[root] == std::numeric_limits<std::size_t>::max()) rep[root] = leaf;
        assignment[leaf] = rep[root];
    }
    return assignment;  // labels are representative leaf slots, not dense ids
}

}  // namespace

ClusterHierarchy greedy_global_hierarchy(const StationGraph& g) {
    const std::size_t n_comp = g.component_count();
    if (n_comp == 0) fail(errc::invalid, "greedy hierarchy: graph has no components");

    std::vector<Dendrogram> dendros;
    dendros.reserve(n_comp);
    for (std::size_t c = 0; c < n_comp; ++c)
        dendros.push_back(ward_hierarchy(g.shortest_path_matrix(c)));

    std::vector<std::size_t> kept;  // merges currently kept per component
    for (const auto& d : dendros) kept.push_back(d.merges.size());

    const auto snapshot = [&]() {
        // dense global labels, assigned in (component, representative slot) order
        std::vector<std::size_t> assignment(g.station_count());
        std::size_t next = 0;
        for (std::size_t c = 0; c < n_comp; ++c) {
            const auto local = cut_assignment(dendros[c], kept[c]);
            const auto& members = g.component_members(c);
            std::vector<std::size_t> label(dendros[c].n_leaves,
                                           std::numeric_limits<std::size_t>::max());
            for (std::size_t slot = 0; slot < members.size(); ++slot) {
                const std::size_t rep = local[slot];
                if (label[rep] == std::numeric_limits<std::size_t>::max()) label[rep] = next++;
                assignment[members[slot]] = label[rep];
            }
        }
        HierarchyLevel level;
        level.n_clusters = next;
        level.inertia = inertia(g, assignment, next);
        level.assignment = std::move(assignment);
        return level;
    };

    ClusterHierarchy h;
    h.levels.push_back(snapshot());
    while (true) {
        std::size_t pick = n_comp;
        double best_delta = -1.0;
        for (std::size_t c = 0; c < n_comp; ++c) {
            if (kept[c] == 0) continue;
            const double delta = dendros[c].merges[kept[c] - 1].delta;
            if (delta > best_delta) {
                best_delta = delta;
                pick = c;
            }
        }
        if (pick == n_comp) break;
        --kept[pick];
        h.levels.push_back(snapshot());
    }
    return h;
}

Clustering select_clustering(const ClusterHierarchy& h, std::size_t m_min, std::size_t m_max) {
    if (h.levels.empty()) fail(errc::invalid, "select_clustering: empty hierarchy");
    std::vector<std::pair<double, double>> pts;
    std::vector<std::size_t> level_idx;
    for (std::size_t i = 0; i < h.levels.size(); ++i) {
        const std::size_t m = h.levels[i].n_clusters;
        if (m >= m_min && m <= m_max) {
            pts.emplace_back(static_cast<double>(m), h.levels[i].inertia);
            level_idx.push_back(i);
        }
    }
    if (pts.size() < 5)
        fail(errc::invalid, "select_clustering: fewer than 5 hierarchy levels in the M range");
    const std::size_t knee = elbow_select(pts);
    const auto& lvl = h.levels[level_idx[knee]];
    return {lvl.assignment, lvl.n_clusters, lvl.inertia};
}

MRange resolve_m_range(const StationGraph& g, std::size_t m_min, std::size_t m_max) {
    const std::size_t n = g.station_count();
    m_min = std::max(m_min, g.component_count());
    if (m_max == 0)
        m_max = std::min<std::size_t>(n > 0 ? n - 1 : 0, std::max<std::size_t>(35, m_min + 4));
    else
        m_max = std::min(m_max, n);
    return {m_min, m_max};
}

Clustering select_clustering_auto(const StationGraph& g, const ClusterHierarchy& h,
                                  std::size_t m_min, std::size_t m_max) {
    const MRange r = resolve_m_range(g, m_min, m_max);
    return select_clustering(h, r.m_min, r.m_max);
}

}  // namespace censeg
