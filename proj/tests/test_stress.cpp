#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "portflow/generator.hpp"
#include "portflow/stress.hpp"

#include "oracles.hpp"

using namespace portflow;

namespace {

/// Boundary exit of a ray from the centre, found by bisection on containment.
double exit_param(const Rect& r, Point dir)
{
    double lo = 0, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        double mid = (lo + hi) / 2;
        (r.contains(r.centre + dir * mid) ? lo : hi) = mid;
    }
    return lo;
}

double oracle_boundary_distance(const Rect& a, const Rect& b)
{
    Point d = b.centre - a.centre;
    double len = norm(d);
    Point unit = d * (1 / len);
    return std::max(0.0, len - exit_param(a, unit) - exit_param(b, unit));
}

Node atomic(const std::string& id, double w = 40, double h = 30) { return {id, w, h, {}, NodeKind::Atomic, id, {}}; }

}  // namespace

TEST_CASE("boundary distance")
{
    CHECK(boundary_distance({{0, 0}, 1, 1}, {{3, 0}, 1, 1}) == doctest::Approx(2.0));
    CHECK(boundary_distance({{0, 0}, 1, 1}, {{0, 0}, 1, 1}) == kCoincidentDistance);
    CHECK(boundary_distance({{0, 0}, 2, 2}, {{3, 3}, 2, 2}) == doctest::Approx(std::sqrt(2.0)));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(-100, 100), s(1, 30);
    for (int i = 0; i < 200; ++i) {
        Rect a{{c(rng), c(rng)}, s(rng), s(rng)}, b{{c(rng), c(rng)}, s(rng), s(rng)};
        CHECK(boundary_distance(a, b) == doctest::Approx(oracle_boundary_distance(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("p-stress hinge arithmetic")
{
    const double l = 80;
    std::vector<WeightedEdge> e{{0, 1, l, l}};
    auto terms = compute_pair_terms(2, e);
    std::vector<Rect> exact{{{0, 0}, 10, 10}, {{l + 10, 0}, 10, 10}};
    CHECK(pstress(exact, terms) == doctest::Approx(0.0));
    std::vector<Rect> stretched{{{0, 0}, 10, 10}, {{2 * l + 10, 0}, 10, 10}};
    CHECK(pstress(stretched, terms) == doctest::Approx(1.0));
}

TEST_CASE("p-stress matches a naive evaluator")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> c(0, 300), s(5, 40), len(40, 120);
    for (int round = 0; round < 20; ++round) {
        std::vector<WeightedEdge> edges;
        for (std::size_t v = 1; v < 6; ++v) {
            double l = len(rng);
            edges.push_back({rng() % v, v, l, l});
        }
        auto terms = compute_pair_terms(6, edges);
        std::vector<Rect> r(6);
        for (auto& x : r) x = {{c(rng), c(rng)}, s(rng), s(rng)};
        // naive: Floyd-Warshall desired distances, then both hinge sums
        std::vector<std::vector<double>> d(6, std::vector<double>(6, INFINITY));
        for (int i = 0; i < 6; ++i) d[i][i] = 0;
        for (auto& e : edges) d[e.u][e.v] = d[e.v][e.u] = std::min(d[e.u][e.v], e.hop);
        for (int k = 0; k < 6; ++k)
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
        double want = 0;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) {
                double b = oracle_boundary_distance(r[i], r[j]);
                double gap = std::max(0.0, d[i][j] - b);
                want += gap * gap / (d[i][j] * d[i][j]);
            }
        for (auto& e : edges) {
            double over = std::max(0.0, oracle_boundary_distance(r[e.u], r[e.v]) - e.ideal);
            want += over * over / (e.ideal * e.ideal);
        }
        CHECK(pstress(r, terms) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("pair terms on a path and across components")
{
    const double l = 80;
    std::vector<WeightedEdge> e{{0, 1, l, l}, {1, 2, l, l}};
    auto t = compute_pair_terms(4, e);
    CHECK(t.hop(0, 2) == 2);
    CHECK(t.distance(0, 2) == doctest::Approx(2 * l));
    CHECK(t.weight(0, 2) == doctest::Approx(1 / (4 * l * l)));
    CHECK(t.hop(0, 3) == -1);
    CHECK(t.weight(0, 3) == 0);
}

TEST_CASE("degree heuristic lengthens edges of busy nodes")
{
    StressConfig cfg;
    CHECK(degree_ideal_length(cfg, 2, 1) == cfg.ideal_length);
    CHECK(degree_ideal_length(cfg, 4, 1) == doctest::Approx(cfg.ideal_length * 1.3));
    CHECK(degree_ideal_length(cfg, 40, 40) == doctest::Approx(2 * cfg.ideal_length));

    // a node with two out-ports feeding two chains
    DiagramGraph g;
    for (auto id : {"a", "b", "c", "d", "e"}) g.nodes.push_back(atomic(id));
    g.edges = {{"ab", "", "", "a", "b"}, {"ac", "", "", "a", "c"}, {"bd", "", "", "b", "d"},
               {"ce", "", "", "c", "e"}, {"ad", "", "", "a", "d"}};
    auto aux = flatten_compound(expand_ports(g));
    auto w = make_work_graph(aux, cfg);
    double plain = w.edges[3].ideal;
    CHECK(w.edges[0].ideal >= plain);
    CHECK(w.edges[1].ideal >= plain);
    CHECK(w.edges[0].ideal > cfg.ideal_length);
}

TEST_CASE("greedy feedback arc set")
{
    std::vector<Arc> dag{{0, 1}, {1, 2}, {0, 2}};
    CHECK(greedy_fas(3, dag).empty());
    std::vector<Arc> cyc{{0, 1}, {1, 2}, {2, 0}};
    CHECK(greedy_fas(3, cyc).size() == 1);

    std::mt19937_64 rng(21);
    for (std::size_t n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<Arc> t;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) t.push_back(rng() % 2 ? Arc{i, j} : Arc{j, i});
            auto fas = greedy_fas(n, t);
            CHECK(oracle::acyclic(n, t, fas));
            CHECK(static_cast<double>(fas.size()) <= t.size() / 2.0 - n / 6.0 + 1e-9);
        }
    }
}

TEST_CASE("flow constraints")
{
    StressConfig cfg;
    DiagramGraph one;
    one.nodes = {atomic("a"), atomic("b")};
    one.edges = {{"e", "", "", "a", "b"}};
    auto aux1 = flatten_compound(expand_ports(one));
    auto f1 = build_flow_constraints(make_work_graph(aux1, cfg), cfg);
    REQUIRE(f1.constraints.size() == 1);
    CHECK(f1.constraints[0].gap == cfg.flow_gap);

    DiagramGraph cyc;
    cyc.nodes = {atomic("a"), atomic("b"), atomic("c")};
    cyc.edges = {{"e1", "", "", "a", "b"}, {"e2", "", "", "b", "c"}, {"e3", "", "", "c", "a"}};
    auto aux3 = flatten_compound(expand_ports(cyc));
    auto f3 = build_flow_constraints(make_work_graph(aux3, cfg), cfg);
    CHECK(f3.constraints.size() == 2);
    CHECK(f3.withheld.size() == 1);

    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto aux = flatten_compound(expand_ports(gen_random(25, seed)));
        auto f = build_flow_constraints(make_work_graph(aux, cfg), cfg);
        CHECK(is_satisfiable(aux.node_count(), f.constraints));
    }
}

TEST_CASE("port dummy constraints")
{
    Node n = atomic("n", 40, 30);
    const double ds = 6;
    Port fixed{"p", "n", PortConstraint::FixedPosition, {}, Point{20, 0}, {}, {}};
    auto c = port_dummy_constraints(fixed, n, 0, 1, ds, Side::Right);
    REQUIRE(c.x.size() == 1);
    REQUIRE(c.y.size() == 1);
    CHECK(c.x[0].equality);
    CHECK(c.x[0].gap == doctest::Approx(20 + ds / 2));
    CHECK(c.y[0].gap == 0);

    Port side{"q", "n", PortConstraint::FixedSide, Side::Right, {}, {}, {}};
    auto s = port_dummy_constraints(side, n, 0, 1, ds, Side::Left);
    REQUIRE(s.x.size() == 1);
    CHECK(s.x[0].equality);
    CHECK(std::none_of(s.y.begin(), s.y.end(), [](auto& k) { return k.equality; }));

    DiagramGraph g;
    g.nodes = {n};
    g.ports = {{"r1", "n", PortConstraint::FixedOrder, Side::Right, {}, 1, {}},
               {"r2", "n", PortConstraint::FixedOrder, Side::Right, {}, 2, {}}};
    g.validate();
    std::vector<std::size_t> var{1, 2};
    AxisConstraints all;
    for (PortIndex p = 0; p < 2; ++p) all.append(port_dummy_constraints(g.ports[p], n, 0, var[p], ds, Side::Right));
    all.append(port_order_constraints(g, 0, var, ds));
    auto ys = project(std::vector<double>{0, 5, -5}, all.y);
    CHECK(ys[1] + ds <= ys[2] + 1e-9);
}

TEST_CASE("stage one on tiny graphs")
{
    StressConfig cfg;
    DiagramGraph single;
    single.nodes = {atomic("a")};
    single.nodes[0].position = Point{12, 34};
    auto r1 = position_nodes(flatten_compound(expand_ports(single)), cfg);
    CHECK(*r1.layout.positions[0] == Point{12, 34});

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        DiagramGraph two;
        two.nodes = {atomic("a"), atomic("b")};
        two.edges = {{"e", "", "", "a", "b"}};
        auto aux = flatten_compound(expand_ports(two));
        cfg.seed = seed;
        auto r = position_nodes(aux, cfg);
        Rect pa = aux.rect(aux.dummy_of(0), *r.layout.positions[aux.dummy_of(0)]);
        Rect pb = aux.rect(aux.dummy_of(1), *r.layout.positions[aux.dummy_of(1)]);
        CHECK(std::abs(boundary_distance(pa, pb) - cfg.ideal_length) <= 0.02 * cfg.ideal_length);
    }
}

TEST_CASE("stage one honours flow and removes overlaps")
{
    StressConfig cfg;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto aux = flatten_compound(expand_ports(gen_random(20, seed)));
        cfg.seed = seed;
        auto r = position_nodes(aux, cfg);
        auto work = make_work_graph(aux, cfg);
        for (auto& run : r.runs)
            for (std::size_t i = 1; i < run.stress.size(); ++i) CHECK(run.stress[i] <= run.stress[i - 1] + 1e-9);
        for (auto k : r.flow.retained) {
            auto& e = work.edges[k];
            CHECK(r.layout.positions[work.aux_of[e.u]]->x + cfg.flow_gap <=
                  r.layout.positions[work.aux_of[e.v]]->x + 1e-6);
        }
        for (NodeIndex a = 0; a < aux.proper_count(); ++a)
            for (NodeIndex b = a + 1; b < aux.proper_count(); ++b)
                CHECK_FALSE(rects_overlap(aux.rect(a, *r.layout.positions[a]), aux.rect(b, *r.layout.positions[b])));
    }
}
