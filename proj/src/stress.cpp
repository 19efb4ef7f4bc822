#include "portflow/stress.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <string>

namespace portflow {

void StressConfig::validate() const
{
    auto positive = [](double v, const char* what) {
        if (!(v > 0) || !std::isfinite(v)) throw LayoutError(std::string(what) + " must be positive");
    };
    positive(ideal_length, "ideal edge length");
    positive(flow_gap, "flow gap");
    positive(convergence_tol, "convergence tolerance");
    if (!(spacing >= 0)) throw LayoutError("non-overlap spacing must be non-negative");
    if (!(cluster_padding >= 0)) throw LayoutError("cluster padding must be non-negative");
    if (max_iterations < 1) throw LayoutError("max iterations must be at least 1");
    if (!(degree_scale >= 0)) throw LayoutError("degree scale must be non-negative");
}

double degree_ideal_length(const StressConfig& cfg, std::size_t deg_source, std::size_t deg_target)
{
    auto extra = [](std::size_t d) { return d > 2 ? static_cast<double>(d - 2) : 0.0; };
    double f = 1.0 + cfg.degree_scale * (extra(deg_source) + extra(deg_target));
    return cfg.ideal_length * std::min(f, 2.0);
}

double parent_link_length(const Port& port, const Node& node, double dummy_size)
{
    if (port.constraint == PortConstraint::FixedPosition && port.fixed_offset) {
        Point o = *port.fixed_offset;
        auto side = side_of_point(Rect{{0, 0}, node.width, node.height}, o).value_or(Side::Right);
        return norm(o + side_normal(side) * (dummy_size / 2));
    }
    Side s = port.side.value_or(Side::Right);
    bool horizontal = s == Side::Left || s == Side::Right;
    return (horizontal ? node.width : node.height) / 2 + dummy_size / 2;
}

WorkGraph make_work_graph(const AuxGraph& aux, const StressConfig& cfg)
{
    if (!aux.flattened) throw LayoutError("stage 1 needs the flattened auxiliary graph");
    const auto& g = aux.graph;
    WorkGraph w;
    w.aux = &aux;
    w.aux_of = aux.flat_nodes;
    w.work_of.assign(aux.node_count(), WorkGraph::npos);
    for (std::size_t i = 0; i < w.aux_of.size(); ++i) w.work_of[w.aux_of[i]] = i;

    w.owner_degree.assign(aux.proper_count(), 0);
    for (const auto& fe : aux.flat_edges) {
        ++w.owner_degree[aux.owner(fe.source_dummy)];
        ++w.owner_degree[aux.owner(fe.target_dummy)];
    }
    for (std::size_t k = 0; k < aux.flat_edges.size(); ++k) {
        const auto& fe = aux.flat_edges[k];
        double ideal = degree_ideal_length(cfg, w.owner_degree[aux.owner(fe.source_dummy)],
                                           w.owner_degree[aux.owner(fe.target_dummy)]);
        w.edges.push_back({w.work_of[fe.source_dummy], w.work_of[fe.target_dummy], ideal, ideal});
        w.edge_flat.push_back(k);
    }
    w.inter_count = w.edges.size();
    for (std::size_t a : w.aux_of) {
        if (!aux.is_dummy(a)) continue;
        PortIndex p = aux.port_of(a);
        NodeIndex n = g.port_parent(p);
        double len = parent_link_length(g.ports[p], g.nodes[n], aux.dummy_size);
        // parent links add nothing to pairwise path lengths: a dummy hugs its node's boundary
        w.edges.push_back({w.work_of[n], w.work_of[a], len, 0.0});
    }
    return w;
}

PairTerms compute_pair_terms(std::size_t n, std::span<const WeightedEdge> edges)
{
    PairTerms t;
    t.n = n;
    t.hops.assign(n * n, -1);
    t.desired.assign(n * n, std::numeric_limits<double>::infinity());
    t.edges.assign(edges.begin(), edges.end());
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : edges) {
        if (e.u == e.v) continue;
        adj[e.u].push_back({e.v, e.hop});
        adj[e.v].push_back({e.u, e.hop});
    }
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        int* hop = &t.hops[s * n];
        hop[s] = 0;
        std::deque<std::size_t> bfs{s};
        while (!bfs.empty()) {
            std::size_t u = bfs.front();
            bfs.pop_front();
            for (auto [v, len] : adj[u]) {
                if (hop[v] < 0) {
                    hop[v] = hop[u] + 1;
                    bfs.push_back(v);
                }
            }
        }
        double* dist = &t.desired[s * n];
        dist[s] = 0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (auto [v, len] : adj[u]) {
                if (d + len < dist[v]) {
                    dist[v] = d + len;
                    pq.push({dist[v], v});
                }
            }
        }
    }
    for (auto& d : t.desired)
        if (!std::isfinite(d)) d = 0.0;
    return t;
}

PairTerms compute_pair_terms(const WorkGraph& work) { return compute_pair_terms(work.size(), work.edges); }

double pstress(std::span<const Rect> rects, const PairTerms& terms)
{
    double s = 0.0;
    const std::size_t n = terms.n;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            double w = terms.weight(u, v);
            if (w == 0.0) continue;
            double gap = terms.distance(u, v) - boundary_distance(rects[u], rects[v]);
            if (gap > 0) s += w * gap * gap;
        }
    }
    for (const auto& e : terms.edges) {
        double over = boundary_distance(rects[e.u], rects[e.v]) - e.ideal;
        if (over > 0) s += over * over / (e.ideal * e.ideal);
    }
    return s;
}

FlowConstraintSet build_flow_constraints(const WorkGraph& work, const StressConfig& cfg)
{
    const AuxGraph& aux = *work.aux;
    std::vector<Arc> arcs;
    for (std::size_t k = 0; k < work.inter_count; ++k) {
        const auto& e = work.edges[k];
        arcs.push_back({aux.owner(work.aux_of[e.u]), aux.owner(work.aux_of[e.v])});
    }
    auto fas = greedy_fas(aux.proper_count(), arcs);
    std::vector<bool> withheld(arcs.size(), false);
    for (std::size_t k : fas) withheld[k] = true;
    FlowConstraintSet out;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        if (withheld[k]) {
            out.withheld.push_back(k);
        } else {
            out.retained.push_back(k);
            out.constraints.push_back({work.edges[k].u, work.edges[k].v, cfg.flow_gap, false});
        }
    }
    return out;
}

AxisConstraints port_dummy_constraints(const Port& port, const Node& node, std::size_t nv,
                                       std::size_t dv, double ds, Side free_side)
{
    AxisConstraints out;
    const double hw = node.width / 2, hh = node.height / 2;
    if (port.constraint == PortConstraint::FixedPosition) {
        if (!port.fixed_offset) throw GraphError("port '" + port.id + "' has no fixed offset");
        Point o = *port.fixed_offset;
        auto side = side_of_point(Rect{{0, 0}, node.width, node.height}, o).value_or(Side::Right);
        Point c = o + side_normal(side) * (ds / 2);
        out.x.push_back({nv, dv, c.x, true});
        out.y.push_back({nv, dv, c.y, true});
        return out;
    }
    const bool free = port.constraint == PortConstraint::Free;
    Side side = free ? free_side : port.side.value_or(Side::Right);
    const bool horizontal = side == Side::Left || side == Side::Right;
    const double normal_half = horizontal ? hw : hh;
    const double lateral_half = horizontal ? hh : hw;
    auto& normal = horizontal ? out.x : out.y;
    auto& lateral = horizontal ? out.y : out.x;
    const bool positive = side == Side::Right || side == Side::Bottom;
    if (free) {
        double near = normal_half + ds / 2, far = normal_half + ds;
        if (positive) {
            normal.push_back({nv, dv, near, false});
            normal.push_back({dv, nv, -far, false});
        } else {
            normal.push_back({dv, nv, near, false});
            normal.push_back({nv, dv, -far, false});
        }
        lateral.push_back({nv, dv, -lateral_half, false});
        lateral.push_back({dv, nv, -lateral_half, false});
        return out;
    }
    double gap = normal_half + ds / 2;
    normal.push_back({nv, dv, positive ? gap : -gap, true});
    double lim = std::max(0.0, lateral_half - ds / 2);
    lateral.push_back({nv, dv, -lim, false});
    lateral.push_back({dv, nv, -lim, false});
    return out;
}

AxisConstraints port_order_constraints(const DiagramGraph& g, NodeIndex n,
                                       const std::vector<std::size_t>& dummy_var, double ds)
{
    std::map<Side, std::vector<std::pair<int, PortIndex>>> by_side;
    for (PortIndex p : g.ports_of(n)) {
        const Port& port = g.ports[p];
        if (port.constraint != PortConstraint::FixedOrder) continue;
        by_side[port.side.value_or(Side::Right)].push_back({port.declared_order.value_or(0), p});
    }
    AxisConstraints out;
    for (auto& [side, list] : by_side) {
        std::sort(list.begin(), list.end());
        bool horizontal = side == Side::Left || side == Side::Right;
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].first == list[i - 1].first)
                throw GraphError("ports '" + g.ports[list[i - 1].second].id + "' and '" +
                                 g.ports[list[i].second].id + "' share an order rank");
            SeparationConstraint c{dummy_var[list[i - 1].second], dummy_var[list[i].second], ds, false};
            (horizontal ? out.y : out.x).push_back(c);
        }
    }
    return out;
}

Side choose_free_side(const Point& centre, std::span<const Point> neighbours, Side current)
{
    if (neighbours.empty()) return current;
    Point m{0, 0};
    for (const auto& p : neighbours) m = m + p;
    m = m * (1.0 / static_cast<double>(neighbours.size()));
    Point d = m - centre;
    if (d.x == 0 && d.y == 0) return current;
    if (std::abs(d.x) >= std::abs(d.y)) return d.x >= 0 ? Side::Right : Side::Left;
    return d.y > 0 ? Side::Bottom : Side::Top;
}

}  // namespace portflow
