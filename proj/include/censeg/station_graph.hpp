#ifndef CENSEG_STATION_GRAPH_HPP
#define CENSEG_STATION_GRAPH_HPP

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace censeg {

// Hydrographic line network: nodes are section connecting points (projected meters),
// sections are edges weighted by river length.
struct RiverNetwork {
    struct Section {
        std::size_t a;
        std::size_t b;
        double length;  // meters, > 0
    };
    std::vector<std::string> node_ids;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<Section> sections;

    std::size_t node_count() const { return node_ids.size(); }
};

struct StationSite {
    std::string id;
    double x;
    double y;
};

// nodes CSV: node_id,x_m,y_m ; edges CSV: node_a,node_b,length_m
RiverNetwork read_river_network(std::istream& nodes_csv, std::istream& edges_csv);

// stations CSV: station_id,x_m,y_m
std::vector<StationSite> read_stations_csv(std::istream& in);

struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> d;

    explicit DistanceMatrix(std::size_t size = 0) : n(size), d(size * size, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return d[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

// Each station mapped to the Euclidean-nearest river node; ties take the lowest index.
std::vector<std::size_t> snap_stations(std::span<const StationSite> stations,
                                       const RiverNetwork& river);

// Station graph: stations snapped to a river network, connected components inherited
// from river connectivity, and within each component the complete matrix of
// shortest-path distances between the snapped nodes. Stations snapped to the same
// node are ϵ = 1 m apart to keep edge weights positive.
class StationGraph {
public:
    static StationGraph build(std::vector<StationSite> stations, const RiverNetwork& river);

    StationGraph induced(const std::set<std::string>& keep) const;

    std::size_t station_count() const { return stations_.size(); }
    std::size_t component_count() const { return components_.size(); }
    const std::vector<StationSite>& stations() const { return stations_; }
    std::size_t component_of(std::size_t station) const { return component_of_[station]; }
    const std::vector<std::size_t>& component_members(std::size_t c) const { return components_[c]; }

    // All-pairs matrix of one component, rows/cols following component_members order.
    const DistanceMatrix& shortest_path_matrix(std::size_t component) const;

    // Distance between two stations of the same component; cross-component pairs throw.
    double distance(std::size_t i, std::size_t j) const;

    std::size_t index_of(const std::string& station_id) const;

private:
    std::vector<StationSite> stations_;
    std::vector<std::size_t> component_of_;
    std::vector<std::vector<std::size_t>> components_;   // station indices per component
    std::vector<std::size_t> slot_in_component_;         // station -> row in its matrix
    std::vector<DistanceMatrix> matrices_;
};

}  // namespace censeg

#endif
