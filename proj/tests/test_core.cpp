#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "portflow/generator.hpp"
#include "portflow/io.hpp"
#include "portflow/pipeline.hpp"

#include "oracles.hpp"

using namespace portflow;

namespace {

DiagramGraph random_nested(std::mt19937_64& rng)
{
    DiagramGraph g;
    std::uniform_int_distribution<int> coin(0, 1), nports(1, 3);
    auto add = [&](const std::string& id, std::optional<std::string> parent, NodeKind k) {
        g.nodes.push_back({id, 40, 30, parent, k, id, {}});
    };
    int comps = 2 + coin(rng);
    for (int c = 0; c < comps; ++c) {
        std::string cid = "C" + std::to_string(c);
        add(cid, std::nullopt, NodeKind::Compound);
        if (coin(rng)) add(cid + "i", cid, NodeKind::Compound);
    }
    std::vector<std::string> parents;
    for (const auto& n : g.nodes) parents.push_back(n.id);
    for (int a = 0; a < 6; ++a) {
        std::uniform_int_distribution<std::size_t> pick(0, parents.size());
        std::size_t k = pick(rng);
        add("a" + std::to_string(a), k == parents.size() ? std::nullopt : std::optional<std::string>(parents[k]),
            NodeKind::Atomic);
    }
    for (const auto& n : g.nodes)
        for (int p = nports(rng); p > 0; --p) g.ports.push_back({n.id + ".p" + std::to_string(p), n.id, {}, {}, {}, {}, {}});
    std::uniform_int_distribution<std::size_t> port(0, g.ports.size() - 1);
    for (int e = 0; e < 18; ++e) {
        std::size_t s = port(rng), t = port(rng);
        if (s == t) continue;
        g.edges.push_back({"e" + std::to_string(e), g.ports[s].id, g.ports[t].id, "", ""});
    }
    return g;
}

bool on_boundary(const Rect& r, const Point& p, double tol)
{
    bool inside = r.inflated(tol).contains(p);
    bool deep = r.inflated(-tol).contains(p) && r.width > 2 * tol && r.height > 2 * tol;
    return inside && !deep;
}

Rect owner_rect(const DiagramGraph& g, const Layout& lay, NodeIndex n)
{
    if (lay.cluster_rects[n]) return *lay.cluster_rects[n];
    return {*lay.positions[n], g.nodes[n].width, g.nodes[n].height};
}

}  // namespace

TEST_CASE("port expansion counts")
{
    DiagramGraph two;
    two.nodes = {{"a", 40, 30, {}, NodeKind::Atomic, "a", {}}, {"b", 40, 30, {}, NodeKind::Atomic, "b", {}}};
    two.ports = {{"p", "a", {}, {}, {}, {}, {}}, {"q", "b", {}, {}, {}, {}, {}}};
    two.edges = {{"e", "p", "q", "", ""}};
    auto aux = expand_ports(two);
    CHECK(aux.node_count() == 4);
    CHECK(aux.edges.size() == 3);

    DiagramGraph one;
    one.nodes = {two.nodes[0]};
    auto lone = expand_ports(one);
    CHECK(lone.node_count() == 1);
    CHECK(lone.edges.empty());

    // one node feeding two chains through two out-ports
    DiagramGraph fan;
    for (const char* id : {"a", "b", "c", "d"}) fan.nodes.push_back({id, 40, 30, {}, NodeKind::Atomic, id, {}});
    fan.ports = {{"a.o1", "a", {}, {}, {}, {}, {}}, {"a.o2", "a", {}, {}, {}, {}, {}},
                 {"b.i", "b", {}, {}, {}, {}, {}}, {"c.i", "c", {}, {}, {}, {}, {}}};
    fan.edges = {{"ab", "a.o1", "b.i", "", ""}, {"ac", "a.o2", "c.i", "", ""}, {"cd", "", "", "c", "d"}};
    auto f = expand_ports(fan);
    CHECK(f.created_ports.size() == 2);
    CHECK(f.graph.ports.size() == 6);
    std::size_t links = 0;
    for (const auto& e : f.edges) links += e.kind == AuxEdgeKind::ParentLink;
    CHECK(links == 6);
    for (PortIndex p = 0; p < 4; ++p) {
        bool linked = false;
        for (const auto& e : f.edges)
            linked |= e.kind == AuxEdgeKind::ParentLink && e.origin == p &&
                      ((e.source == f.dummy_of(p) && e.target == f.graph.port_parent(p)) ||
                       (e.target == f.dummy_of(p) && e.source == f.graph.port_parent(p)));
        CHECK(linked);
    }

    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        auto g = t % 2 ? gen_random(1 + t, t) : random_nested(rng);
        auto x = expand_ports(g);
        CHECK(x.node_count() == x.graph.nodes.size() + x.graph.ports.size());
        CHECK(x.edges.size() == x.graph.edges.size() + x.graph.ports.size());
        std::set<std::size_t> dummies;
        for (PortIndex p = 0; p < x.graph.ports.size(); ++p) {
            dummies.insert(x.dummy_of(p));
            CHECK(x.port_of(x.dummy_of(p)) == p);
        }
        CHECK(dummies.size() == x.graph.ports.size());
    }
}

TEST_CASE("graph validation errors")
{
    DiagramGraph g;
    g.nodes = {{"a", 40, 30, {}, NodeKind::Atomic, "a", {}}};
    g.ports = {{"p", "a", {}, {}, {}, {}, {}}, {"p", "a", {}, {}, {}, {}, {}}};
    CHECK_THROWS_AS(expand_ports(g), GraphError);
    g.ports.pop_back();
    g.edges = {{"e", "p", "nowhere", "", ""}};
    CHECK_THROWS_AS(expand_ports(g), GraphError);
    CHECK_THROWS_AS(parse_port_constraint("fixed_ratio"), GraphError);
}

TEST_CASE("flattening matches exhaustive chain enumeration")
{
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        auto g = random_nested(rng);
        auto aux = flatten_compound(expand_ports(g));
        std::multiset<oracle::Chain> got;
        for (const auto& fe : aux.flat_edges) {
            got.insert(fe.chain);
            CHECK(fe.source_dummy == aux.dummy_of(aux.graph.edge_source(fe.chain.front())));
            CHECK(fe.target_dummy == aux.dummy_of(aux.graph.edge_target(fe.chain.back())));
            for (std::size_t i = 0; i + 1 < fe.chain.size(); ++i) {
                PortIndex mid = aux.graph.edge_target(fe.chain[i]);
                CHECK(aux.graph.edge_source(fe.chain[i + 1]) == mid);
                CHECK(aux.graph.is_compound(aux.graph.port_parent(mid)));
            }
        }
        CHECK(got == oracle::chain_oracle(aux.graph));
        for (auto a : aux.flat_nodes) CHECK(aux.graph.is_atomic(aux.owner(a)));
    }
}

TEST_CASE("flat graphs flatten and map back unchanged")
{
    PipelineConfig cfg;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto res = run_pipeline(gen_random(12, seed), cfg, Stages{});
        const auto& aux = res.aux;
        CHECK(aux.flat_edges.size() == aux.graph.edges.size());
        for (std::size_t k = 0; k < aux.flat_edges.size(); ++k) {
            REQUIRE(aux.flat_edges[k].chain.size() == 1);
            EdgeIndex e = aux.flat_edges[k].chain.front();
            CHECK(e == k);
            CHECK(*res.layout.routes[e] == *res.flat.routes[k]);
        }
        for (PortIndex p = 0; p < aux.graph.ports.size(); ++p) CHECK(*res.layout.pins[p] == *res.flat.pins[p]);
        for (NodeIndex n = 0; n < aux.graph.nodes.size(); ++n) CHECK(*res.layout.positions[n] == *res.flat.positions[n]);
    }
}

TEST_CASE("dangling hierarchical chain is dropped with a warning")
{
    DiagramGraph g;
    g.nodes = {{"a", 40, 30, {}, NodeKind::Atomic, "a", {}}, {"c", 100, 100, {}, NodeKind::Compound, "c", {}}};
    g.ports = {{"a.o", "a", {}, {}, {}, {}, {}}, {"c.i", "c", {}, {}, {}, {}, {}}};
    g.edges = {{"in", "a.o", "c.i", "", ""}};
    auto aux = flatten_compound(expand_ports(g));
    CHECK(aux.flat_edges.empty());
    REQUIRE(aux.warnings.size() == 1);
    CHECK(aux.warnings[0].edges == std::vector<EdgeIndex>{0});
}

TEST_CASE("single boundary crossing")
{
    DiagramGraph g;
    g.nodes = {{"a", 40, 30, {}, NodeKind::Atomic, "a", {}},
               {"c", 100, 100, {}, NodeKind::Compound, "c", {}},
               {"b", 40, 30, std::string("c"), NodeKind::Atomic, "b", {}}};
    g.ports = {{"a.o", "a", PortConstraint::FixedSide, Side::Right, {}, {}, {}},
               {"c.i", "c", PortConstraint::FixedSide, Side::Left, {}, {}, {}},
               {"b.i", "b", PortConstraint::FixedSide, Side::Left, {}, {}, {}}};
    g.edges = {{"outer", "a.o", "c.i", "", ""}, {"inner", "c.i", "b.i", "", ""}};
    auto res = run_pipeline(g, PipelineConfig{}, Stages{});
    REQUIRE(res.aux.flat_edges.size() == 1);
    CHECK(res.aux.flat_edges[0].chain.size() == 2);
    const auto& lay = res.layout;
    REQUIRE(lay.routes[0]);
    REQUIRE(lay.routes[1]);
    REQUIRE(lay.pins[1]);
    CHECK(on_boundary(*lay.cluster_rects[1], *lay.pins[1], 1e-6));
    CHECK(lay.routes[0]->back() == *lay.pins[1]);
    CHECK(lay.routes[1]->front() == *lay.pins[1]);
}

TEST_CASE("nested sample maps back onto its hierarchy")
{
    auto parsed = read_graph_file(std::string(PORTFLOW_SAMPLES) + "/compound.json");
    CHECK(parsed.warnings.empty());
    auto res = run_pipeline(parsed.graph, PipelineConfig{}, Stages{});
    const auto& g = res.aux.graph;
    const auto& lay = res.layout;

    std::multiset<std::size_t> lengths;
    for (const auto& fe : res.aux.flat_edges) {
        lengths.insert(fe.chain.size());
        std::size_t segments = 0;
        for (EdgeIndex e : fe.chain) segments += lay.routes[e].has_value();
        CHECK(segments == fe.chain.size());
    }
    CHECK(lengths == std::multiset<std::size_t>{1, 1, 1, 2, 3, 4});
    CHECK(oracle::chain_oracle(g).size() == res.aux.flat_edges.size());

    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        REQUIRE(lay.pins[p]);
        CHECK(on_boundary(owner_rect(g, lay, g.port_parent(p)), *lay.pins[p], 1e-6));
    }
    for (EdgeIndex e = 0; e < g.edges.size(); ++e) {
        REQUIRE(lay.routes[e]);
        CHECK(lay.routes[e]->front() == *lay.pins[g.edge_source(e)]);
        CHECK(lay.routes[e]->back() == *lay.pins[g.edge_target(e)]);
    }
    // children stay inside their clusters
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        auto parent = g.node_parent(n);
        if (!parent) continue;
        Rect outer = *lay.cluster_rects[*parent], inner = owner_rect(g, lay, n);
        CHECK(outer.min_x() <= inner.min_x());
        CHECK(outer.max_x() >= inner.max_x());
        CHECK(outer.min_y() <= inner.min_y());
        CHECK(outer.max_y() >= inner.max_y());
    }
}
