#include "censeg/station_graph.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "censeg/csv.hpp"
#include "censeg/error.hpp"

namespace censeg {

namespace {

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// single-source shortest paths over the river sections
std::vector<double> dijkstra(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                             std::size_t source) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(adj.size(), inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, w] : adj[u]) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    return dist;
}

}  // namespace

RiverNetwork read_river_network(std::istream& nodes_csv, std::istream& edges_csv) {
    RiverNetwork river;
    std::map<std::string, std::size_t> index;
    std::size_t line_no = 0;
    for (const auto& raw : read_lines(nodes_csv)) {
        ++line_no;
        const auto sv = trim(raw);
        if (sv.empty()) continue;
        if (line_no == 1) {
            if (sv != "node_id,x_m,y_m") fail(errc::parse, "nodes line 1: expected header 'node_id,x_m,y_m'");
            continue;
        }
        const auto f = split_csv(sv);
        if (f.size() != 3) fail(errc::parse, "nodes line " + std::to_string(line_no) + ": expected 3 fields");
        const std::string id(trim(f[0]));
        if (id.empty()) fail(errc::parse, "nodes line " + std::to_string(line_no) + ": empty node_id");
        if (!index.emplace(id, river.node_ids.size()).second)
            fail(errc::invalid, "nodes line " + std::to_string(line_no) + ": duplicate node_id '" + id + "'");
        river.node_ids.push_back(id);
        river.xs.push_back(parse_double(f[1], line_no, "x_m"));
        river.ys.push_back(parse_double(f[2], line_no, "y_m"));
    }
    if (river.node_ids.empty()) fail(errc::invalid, "river network has no nodes");

    line_no = 0;
    for (const auto& raw : read_lines(edges_csv)) {
        ++line_no;
        const auto sv = trim(raw);
        if (sv.empty()) continue;
        if (line_no == 1) {
            if (sv != "node_a,node_b,length_m")
                fail(errc::parse, "edges line 1: expected header 'node_a,node_b,length_m'");
            continue;
        }
        const auto f = split_csv(sv);
        if (f.size() != 3) fail(errc::parse, "edges line " + std::to_string(line_no) + ": expected 3 fields");
        const auto lookup = [&](std::string_view field) {
            const auto it = index.find(std::string(trim(field)));
            if (it == index.end())
                fail(errc::invalid,
                     "edges line " + std::to_string(line_no) + ": unknown node '" + std::string(trim(field)) + "'");
            return it->second;
        };
        RiverNetwork::Section s;
        s.a = lookup(f[0]);
        s.b = lookup(f[1]);
        s.length = parse_double(f[2], line_no, "length_m");
        if (!(s.length > 0.0))
            fail(errc::invalid, "edges line " + std::to_string(line_no) + ": section length must be > 0");
        river.sections.push_back(s);
    }
    return river;
}

std::vector<StationSite> read_stations_csv(std::istream& in) {
    std::vector<StationSite> out;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto sv = trim(line);
        if (sv.empty()) continue;
        if (line_no == 1) {
            if (sv != "station_id,x_m,y_m")
                fail(errc::parse, "stations line 1: expected header 'station_id,x_m,y_m'");
            continue;
        }
        const auto f = split_csv(sv);
        if (f.size() != 3)
            fail(errc::parse, "stations line " + std::to_string(line_no) + ": expected 3 fields");
        StationSite s;
        s.id = std::string(trim(f[0]));
        if (s.id.empty()) fail(errc::parse, "stations line " + std::to_string(line_no) + ": empty station_id");
        s.x = parse_double(f[1], line_no, "x_m");
        s.y = parse_double(f[2], line_no, "y_m");
        out.push_back(std::move(s));
    }
    if (out.empty()) fail(errc::invalid, "stations file has no entries");
    return out;
}

std::vector<std::size_t> snap_stations(std::span<const StationSite> stations,
                                       const RiverNetwork& river) {
    if (river.node_count() == 0) fail(errc::invalid, "snap_stations: empty river network");
    std::vector<std::size_t> snapped;
    snapped.reserve(stations.size());
    for (const auto& s : stations) {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < river.node_count(); ++i) {
            const double dx = s.x - river.xs[i];
            const double dy = s.y - river.ys[i];
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        snapped.push_back(best);
    }
    return snapped;
}

StationGraph StationGraph::build(std::vector<StationSite> stations, const RiverNetwork& river) {
    if (stations.empty()) fail(errc::invalid, "station graph: no stations");
    {
        std::set<std::string> ids;
        for (const auto& s : stations)
            if (!ids.insert(s.id).second)
                fail(errc::invalid, "station graph: duplicate station id '" + s.id + "'");
    }
    StationGraph g;
    const auto snapped = snap_stations(stations, river);
    g.stations_ = std::move(stations);

    std::vector<std::vector<std::pair<std::size_t, double>>> adj(river.node_count());
    UnionFind uf(river.node_count());
    for (const auto& s : river.sections) {
        adj[s.a].emplace_back(s.b, s.length);
        adj[s.b].emplace_back(s.a, s.length);
        uf.unite(s.a, s.b);
    }

    // components in the order their first station appears
    std::map<std::size_t, std::size_t> root_to_component;
    g.component_of_.resize(g.stations_.size());
    for (std::size_t i = 0; i < g.stations_.size(); ++i) {
        const std::size_t root = uf.find(snapped[i]);
        const auto [it, inserted] = root_to_component.emplace(root, g.components_.size());
        if (inserted) g.components_.emplace_back();
        g.component_of_[i] = it->second;
        g.components_[it->second].push_back(i);
    }

    g.slot_in_component_.resize(g.stations_.size());
    for (const auto& members : g.components_)
        for (std::size_t slot = 0; slot < members.size(); ++slot)
            g.slot_in_component_[members[slot]] = slot;

    for (const auto& members : g.components_) {
        DistanceMatrix m(members.size());
        // one Dijkstra per distinct snapped node of the component
        std::map<std::size_t, std::vector<double>> sssp;
        for (const std::size_t st : members) {
            const std::size_t node = snapped[st];
            if (!sssp.count(node)) sssp.emplace(node, dijkstra(adj, node));
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const std::size_t na = snapped[members[i]];
                const std::size_t nb = snapped[members[j]];
                double w = sssp.at(na)[nb];
                if (w == 0.0) w = 1.0;  // identical snapped nodes
                m.at(i, j) = w;
                m.at(j, i) = w;
            }
        }
        g.matrices_.push_back(std::move(m));
    }
    return g;
}

StationGraph StationGraph::induced(const std::set<std::string>& keep) const {
    if (keep.empty()) fail(errc::invalid, "induced_subgraph: empty station set");
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < stations_.size(); ++i)
        if (keep.count(stations_[i].id)) kept.push_back(i);
    if (kept.size() != keep.size()) {
        for (const auto& id : keep) {
            bool found = false;
            for (const auto& s : stations_) found = found || s.id == id;
            if (!found) fail(errc::invalid, "induced_subgraph: unknown station '" + id + "'");
        }
    }

    StationGraph g;
    std::map<std::size_t, std::size_t> comp_map;  // old component -> new component
    g.component_of_.resize(kept.size());
    for (std::size_t n = 0; n < kept.size(); ++n) {
        const std::size_t old = kept[n];
        g.stations_.push_back(stations_[old]);
        const auto [it, inserted] = comp_map.emplace(component_of_[old], g.components_.size());
        if (inserted) g.components_.emplace_back();
        g.component_of_[n] = it->second;
        g.components_[it->second].push_back(n);
    }
    g.slot_in_component_.resize(kept.size());
    for (const auto& members : g.components_)
        for (std::size_t slot = 0; slot < members.size(); ++slot)
            g.slot_in_component_[members[slot]] = slot;

    for (const auto& members : g.components_) {
        DistanceMatrix m(members.size());
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = 0; j < members.size(); ++j) {
                if (i == j) continue;
                m.at(i, j) = distance(kept[members[i]], kept[members[j]]);
            }
        g.matrices_.push_back(std::move(m));
    }
    return g;
}

const DistanceMatrix& StationGraph::shortest_path_matrix(std::size_t component) const {
    if (component >= components_.size()) fail(errc::invalid, "shortest_path_matrix: bad component index");
    return matrices_[component];
}

double StationGraph::distance(std::size_t i, std::size_t j) const {
    if (i >= stations_.size() || j >= stations_.size())
        fail(errc::invalid, "station distance: index out of range");
    if (component_of_[i] != component_of_[j])
        fail(errc::invalid, "station distance: stations lie in different components");
    return matrices_[component_of_[i]].at(slot_in_component_[i], slot_in_component_[j]);
}

std::size_t StationGraph::index_of(const std::string& station_id) const {
    for (std::size_t i = 0; i < stations_.size(); ++i)
        if (stations_[i].id == station_id) return i;
    fail(errc::invalid, "unknown station '" + station_id + "'");
}

}  // namespace censeg
