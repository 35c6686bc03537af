#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "censeg/error.hpp"
#include "censeg/station_graph.hpp"
#include "helpers.hpp"

using namespace censeg;
using namespace censeg::test;

namespace {

RiverNetwork make_river(std::vector<std::pair<double, double>> nodes,
                        std::vector<std::tuple<std::size_t, std::size_t, double>> sections) {
    RiverNetwork r;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        r.node_ids.push_back("n" + std::to_string(i));
        r.xs.push_back(nodes[i].first);
        r.ys.push_back(nodes[i].second);
    }
    for (const auto& [a, b, len] : sections) r.sections.push_back({a, b, len});
    return r;
}

// Y-shaped river: fork at origin, three tips 100 m out.
RiverNetwork y_river() {
    return make_river({{0, 0}, {100, 0}, {-50, 87}, {-50, -87}},
                      {{0, 1, 100.0}, {0, 2, 100.0}, {0, 3, 100.0}});
}

// integer-weighted random connected graph + per-node stations
struct RandomFixture {
    RiverNetwork river;
    std::vector<StationSite> stations;
};

RandomFixture random_fixture(std::mt19937_64& rng, std::size_t n) {
    RandomFixture f;
    std::vector<std::pair<double, double>> nodes;
    for (std::size_t i = 0; i < n; ++i)
        nodes.emplace_back(uniform(rng, 0, 10000), uniform(rng, 0, 10000));
    std::vector<std::tuple<std::size_t, std::size_t, double>> sections;
    for (std::size_t i = 1; i < n; ++i) {
        const auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<double>(i)));
        sections.emplace_back(j, i, std::floor(uniform(rng, 1, 1000)));
    }
    const std::size_t extra = n / 2;
    for (std::size_t e = 0; e < extra; ++e) {
        const auto a = static_cast<std::size_t>(uniform(rng, 0, static_cast<double>(n)));
        const auto b = static_cast<std::size_t>(uniform(rng, 0, static_cast<double>(n)));
        if (a != b) sections.emplace_back(a, b, std::floor(uniform(rng, 1, 1000)));
    }
    f.river = make_river(nodes, sections);
    for (std::size_t i = 0; i < n; ++i)
        f.stations.push_back({"S" + std::to_string(i), nodes[i].first, nodes[i].second});
    return f;
}

std::vector<double> floyd_warshall(const RiverNetwork& r) {
    const std::size_t n = r.node_count();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    for (const auto& s : r.sections) {
        d[s.a * n + s.b] = std::min(d[s.a * n + s.b], s.length);
        d[s.b * n + s.a] = std::min(d[s.b * n + s.a], s.length);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    return d;
}

}  // namespace

TEST_CASE("snap_stations: exact node, tie-break, brute-force scan") {
    const RiverNetwork r = make_river({{0, 0}, {10, 0}, {20, 0}}, {{0, 1, 10}, {1, 2, 10}});
    std::vector<StationSite> st{{"on_node", 10, 0}, {"tie", 5, 0}, {"near_last", 18, 1}};
    const auto snapped = snap_stations(st, r);
    CHECK(snapped[0] == 1);
    CHECK(snapped[1] == 0);  // equidistant to nodes 0 and 1 -> lowest index
    CHECK(snapped[2] == 2);

    std::mt19937_64 rng(211);
    const RandomFixture f = random_fixture(rng, 15);
    std::vector<StationSite> probes;
    for (int i = 0; i < 10; ++i)
        probes.push_back({"P" + std::to_string(i), uniform(rng, 0, 10000), uniform(rng, 0, 10000)});
    const auto got = snap_stations(probes, f.river);
    for (std::size_t s = 0; s < probes.size(); ++s) {
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < f.river.node_count(); ++i) {
            const double dx = probes[s].x - f.river.xs[i];
            const double dy = probes[s].y - f.river.ys[i];
            const double d = std::hypot(dx, dy);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        CHECK(got[s] == best);
    }
}

TEST_CASE("build: Y-shaped river gives three tip-to-tip edges of 200 m") {
    std::vector<StationSite> st{{"A", 100, 0}, {"B", -50, 87}, {"C", -50, -87}};
    const StationGraph g = StationGraph::build(st, y_river());
    CHECK(g.station_count() == 3);
    CHECK(g.component_count() == 1);
    CHECK(g.distance(0, 1) == doctest::Approx(200.0));
    CHECK(g.distance(0, 2) == doctest::Approx(200.0));
    CHECK(g.distance(1, 2) == doctest::Approx(200.0));
}

TEST_CASE("build: disjoint rivers stay in separate components") {
    const RiverNetwork r = make_river({{0, 0}, {100, 0}, {5000, 5000}, {5100, 5000}},
                                      {{0, 1, 100}, {2, 3, 100}});
    std::vector<StationSite> st{{"A", 0, 0}, {"B", 100, 0}, {"C", 5000, 5000}, {"D", 5100, 5000}};
    const StationGraph g = StationGraph::build(st, r);
    CHECK(g.component_count() == 2);
    CHECK(g.distance(0, 1) == doctest::Approx(100.0));
    CHECK_THROWS_AS(g.distance(0, 2), error);
}

TEST_CASE("build: stations snapped to one node get the 1 m floor") {
    const RiverNetwork r = make_river({{0, 0}, {100, 0}}, {{0, 1, 100}});
    std::vector<StationSite> st{{"A", 1, 1}, {"B", -1, -1}};
    const StationGraph g = StationGraph::build(st, r);
    CHECK(g.distance(0, 1) == 1.0);
}

TEST_CASE("build: isolated node becomes a singleton component") {
    const RiverNetwork r = make_river({{0, 0}, {100, 0}, {9000, 9000}}, {{0, 1, 100}});
    std::vector<StationSite> st{{"A", 0, 0}, {"B", 9000, 9000}};
    const StationGraph g = StationGraph::build(st, r);
    CHECK(g.component_count() == 2);
    CHECK(g.component_members(g.component_of(1)).size() == 1);
}

TEST_CASE("induced subgraph: identity, singleton, weight preservation") {
    std::mt19937_64 rng(223);
    const RandomFixture f = random_fixture(rng, 12);
    const StationGraph g = StationGraph::build(f.stations, f.river);

    std::set<std::string> all;
    for (const auto& s : f.stations) all.insert(s.id);
    const StationGraph same = g.induced(all);
    CHECK(same.station_count() == g.station_count());
    CHECK(same.component_count() == g.component_count());

    const StationGraph one = g.induced({"S3"});
    CHECK(one.station_count() == 1);
    CHECK(one.component_count() == 1);

    std::set<std::string> keep = all;
    keep.erase("S5");
    const StationGraph sub = g.induced(keep);
    for (std::size_t i = 0; i < sub.station_count(); ++i)
        for (std::size_t j = i + 1; j < sub.station_count(); ++j) {
            if (sub.component_of(i) != sub.component_of(j)) continue;
            const std::size_t gi = g.index_of(sub.stations()[i].id);
            const std::size_t gj = g.index_of(sub.stations()[j].id);
            CHECK(sub.distance(i, j) == g.distance(gi, gj));
        }

    CHECK_THROWS_AS(g.induced({}), error);
    CHECK_THROWS_AS(g.induced({"missing"}), error);
}

TEST_CASE("shortest_path_matrix matches Floyd-Warshall on random integer graphs") {
    std::mt19937_64 rng(227);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 5 + static_cast<std::size_t>(uniform(rng, 0, 15));
        const RandomFixture f = random_fixture(rng, n);
        const StationGraph g = StationGraph::build(f.stations, f.river);
        const auto fw = floyd_warshall(f.river);
        REQUIRE(g.component_count() == 1);
        const auto snapped = snap_stations(f.stations, f.river);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double expected = std::max(fw[snapped[i] * n + snapped[j]], 1.0);
                CHECK(g.distance(i, j) == expected);  // integer weights: exact
            }
    }
}

TEST_CASE("triangle inequality on every component matrix") {
    std::mt19937_64 rng(229);
    const RandomFixture f = random_fixture(rng, 18);
    const StationGraph g = StationGraph::build(f.stations, f.river);
    for (std::size_t c = 0; c < g.component_count(); ++c) {
        const DistanceMatrix& m = g.shortest_path_matrix(c);
        for (std::size_t i = 0; i < m.n; ++i) {
            CHECK(m.at(i, i) == 0.0);
            for (std::size_t j = 0; j < m.n; ++j) {
                CHECK(m.at(i, j) == m.at(j, i));
                for (std::size_t k = 0; k < m.n; ++k)
                    CHECK(m.at(i, j) <= m.at(i, k) + m.at(k, j) + 1e-9);
            }
        }
    }
}

TEST_CASE("build is invariant under input reordering") {
    std::mt19937_64 rng(233);
    RandomFixture f = random_fixture(rng, 10);
    const StationGraph base = StationGraph::build(f.stations, f.river);

    RiverNetwork shuffled_river = f.river;
    std::shuffle(shuffled_river.sections.begin(), shuffled_river.sections.end(), rng);
    std::vector<StationSite> shuffled_stations = f.stations;
    std::shuffle(shuffled_stations.begin(), shuffled_stations.end(), rng);
    const StationGraph other = StationGraph::build(shuffled_stations, shuffled_river);

    REQUIRE(base.station_count() == other.station_count());
    CHECK(base.component_count() == other.component_count());
    for (const auto& a : f.stations)
        for (const auto& b : f.stations) {
            if (a.id == b.id) continue;
            const auto i1 = base.index_of(a.id), j1 = base.index_of(b.id);
            const auto i2 = other.index_of(a.id), j2 = other.index_of(b.id);
            const bool conn1 = base.component_of(i1) == base.component_of(j1);
            const bool conn2 = other.component_of(i2) == other.component_of(j2);
            CHECK(conn1 == conn2);
            if (conn1) CHECK(base.distance(i1, j1) == other.distance(i2, j2));
        }
}

TEST_CASE("river/station CSV parsing and errors") {
    std::istringstream nodes("node_id,x_m,y_m\na,0,0\nb,100,0\n");
    std::istringstream edges("node_a,node_b,length_m\na,b,100\n");
    const RiverNetwork r = read_river_network(nodes, edges);
    CHECK(r.node_count() == 2);
    REQUIRE(r.sections.size() == 1);
    CHECK(r.sections[0].length == 100.0);

    std::istringstream st("station_id,x_m,y_m\nS1,5,5\n");
    const auto sites = read_stations_csv(st);
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].id == "S1");

    std::istringstream bad_nodes("node_id,x_m,y_m\na,0,0\na,1,1\n");
    std::istringstream e2("node_a,node_b,length_m\n");
    CHECK_THROWS_AS(read_river_network(bad_nodes, e2), error);

    std::istringstream n3("node_id,x_m,y_m\na,0,0\n");
    std::istringstream bad_edges("node_a,node_b,length_m\na,zz,5\n");
    CHECK_THROWS_AS(read_river_network(n3, bad_edges), error);

    std::istringstream n4("node_id,x_m,y_m\na,0,0\nb,1,0\n");
    std::istringstream neg("node_a,node_b,length_m\na,b,-4\n");
    CHECK_THROWS_AS(read_river_network(n4, neg), error);
}
