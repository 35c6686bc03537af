#ifndef CENSEG_CLUSTER_HPP
#define CENSEG_CLUSTER_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "censeg/station_graph.hpp"

namespace censeg {

// Partition of the graph's stations; assignment[i] is the cluster id of station i
// (ids are 0..n_clusters-1, dense).
struct Clustering {
    std::vector<std::size_t> assignment;
    std::size_t n_clusters = 0;
    double inertia = 0.0;
};

// W(P) = sum over clusters of (1/|C|) * sum over ordered within-cluster pairs of the
// squared shortest-path distance. Cross-component clusters are rejected.
double inertia(const StationGraph& g, std::span<const std::size_t> assignment,
               std::size_t n_clusters);

// Agglomerative Ward dendrogram over one distance matrix (Lance-Williams recurrence
// applied to squared distances). delta is the increase of the ordered-pair inertia
// caused by the merge; height = sqrt(delta), so two leaves merge at their distance.
struct Merge {
    std::size_t left;   // cluster index: leaves 0..n-1, merge k creates index n+k
    std::size_t right;
    double delta;
    double height;
};

struct Dendrogram {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;
};

Dendrogram ward_hierarchy(const DistanceMatrix& d);

struct HierarchyLevel {
    std::vector<std::size_t> assignment;
    std::size_t n_clusters = 0;
    double inertia = 0.0;
};

// Level 0 = one cluster per connected component; each next level undoes the pending
// dendrogram merge with the largest inertia decrease among components (ties to the
// lowest component index), down to all-singletons.
struct ClusterHierarchy {
    std::vector<HierarchyLevel> levels;
};

ClusterHierarchy greedy_global_hierarchy(const StationGraph& g);

// Elbow selection of the cluster count on the (M, inertia) curve restricted to
// [m_min, m_max]; needs at least 5 levels in range.
Clustering select_clustering(const ClusterHierarchy& h, std::size_t m_min, std::size_t m_max);

// Resolved [m_min, m_max] for a graph. 0 means automatic: m_min = component count,
// m_max = min(n-1, max(35, m_min+4)) so graphs with many components keep a feasible
// window above the component floor.
struct MRange {
    std::size_t m_min;
    std::size_t m_max;
};
MRange resolve_m_range(const StationGraph& g, std::size_t m_min = 0, std::size_t m_max = 0);

Clustering select_clustering_auto(const StationGraph& g, const ClusterHierarchy& h,
                                  std::size_t m_min = 0, std::size_t m_max = 0);

}  // namespace censeg

#endif
