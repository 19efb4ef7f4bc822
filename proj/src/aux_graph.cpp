#include "portflow/aux_graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>

namespace portflow {

AuxGraph expand_ports(DiagramGraph g, double dummy_size)
{
    if (!(dummy_size > 0)) throw GraphError("dummy size must be positive");
    AuxGraph aux;
    aux.created_ports = g.materialize_ports();
    g.validate();
    aux.graph = std::move(g);
    aux.dummy_size = dummy_size;

    const auto& graph = aux.graph;
    aux.edges.reserve(graph.edges.size() + graph.ports.size());
    for (EdgeIndex e = 0; e < graph.edges.size(); ++e) {
        aux.edges.push_back({aux.dummy_of(graph.edge_source(e)), aux.dummy_of(graph.edge_target(e)),
                             AuxEdgeKind::Inter, e});
    }
    for (PortIndex p = 0; p < graph.ports.size(); ++p) {
        aux.edges.push_back({graph.port_parent(p), aux.dummy_of(p), AuxEdgeKind::ParentLink, p});
    }
    return aux;
}

AuxGraph flatten_compound(AuxGraph aux)
{
    const auto& g = aux.graph;
    aux.flat_nodes.clear();
    aux.flat_edges.clear();
    aux.warnings.clear();

    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (!g.is_atomic(n)) continue;
        aux.flat_nodes.push_back(n);
        for (PortIndex p : g.ports_of(n)) aux.flat_nodes.push_back(aux.dummy_of(p));
    }
    std::sort(aux.flat_nodes.begin(), aux.flat_nodes.end());

    std::vector<std::vector<EdgeIndex>> out_edges(g.ports.size());
    for (EdgeIndex e = 0; e < g.edges.size(); ++e) out_edges[g.edge_source(e)].push_back(e);

    auto atomic_port = [&](PortIndex p) { return g.is_atomic(g.port_parent(p)); };
    std::vector<bool> covered(g.edges.size(), false);

    // Depth-first over directed chains that start at an atomic-owned port.
    std::vector<EdgeIndex> chain;
    std::vector<bool> on_path(g.ports.size(), false);
    std::function<void(EdgeIndex)> extend = [&](EdgeIndex e) {
        chain.push_back(e);
        PortIndex t = g.edge_target(e);
        if (atomic_port(t)) {
            PortIndex s = g.edge_source(chain.front());
            aux.flat_edges.push_back({aux.dummy_of(s), aux.dummy_of(t), chain});
            for (EdgeIndex c : chain) covered[c] = true;
        } else if (on_path[t]) {
            aux.warnings.push_back({"edge chain loops through hierarchical port '" +
                                        g.ports[t].id + "'; dropped",
                                    chain});
        } else if (out_edges[t].empty()) {
            aux.warnings.push_back({"edge chain dead-ends at hierarchical port '" + g.ports[t].id +
                                        "'; dropped",
                                    chain});
        } else {
            on_path[t] = true;
            for (EdgeIndex next : out_edges[t]) extend(next);
            on_path[t] = false;
        }
        chain.pop_back();
    };
    for (EdgeIndex e = 0; e < g.edges.size(); ++e) {
        if (atomic_port(g.edge_source(e))) extend(e);
    }
    for (EdgeIndex e = 0; e < g.edges.size(); ++e) {
        if (!covered[e] && !atomic_port(g.edge_source(e))) {
            bool reported = false;
            for (const auto& w : aux.warnings)
                reported = reported || std::find(w.edges.begin(), w.edges.end(), e) != w.edges.end();
            if (!reported)
                aux.warnings.push_back(
                    {"edge '" + g.edges[e].id + "' is not reachable from an atomic node; dropped", {e}});
        }
    }
    aux.flattened = true;
    return aux;
}

Point default_pin(const Port& port, const Node& node, const Rect& r)
{
    const double hw = r.width / 2, hh = r.height / 2;
    if (port.constraint == PortConstraint::FixedPosition && port.fixed_offset) {
        Point o = *port.fixed_offset;
        return r.centre + Point{o.x / (node.width / 2) * hw, o.y / (node.height / 2) * hh};
    }
    Side s = port.side.value_or(Side::Right);
    return r.centre + Point{side_normal(s).x * hw, side_normal(s).y * hh};
}

namespace {

constexpr double kBoundaryTol = 1e-7;

struct RouteCursor {
    std::size_t segment = 0;
    double t = 0.0;  // fraction along the segment

    bool operator<(const RouteCursor& o) const
    {
        return segment != o.segment ? segment < o.segment : t < o.t;
    }
};

/// First point at or after `from` where the route meets the boundary of r.
std::optional<std::pair<RouteCursor, Point>> next_boundary_hit(const Polyline& route, const Rect& r,
                                                               RouteCursor from, bool strict)
{
    for (std::size_t s = from.segment; s + 1 < route.size(); ++s) {
        const Point a = route[s], b = route[s + 1];
        std::vector<double> ts;
        auto add_x = [&](double x) {
            if (a.x == b.x) return;
            double t = (x - a.x) / (b.x - a.x);
            if (t < -1e-12 || t > 1 + 1e-12) return;
            double y = a.y + t * (b.y - a.y);
            if (y >= r.min_y() - kBoundaryTol && y <= r.max_y() + kBoundaryTol) ts.push_back(t);
        };
        auto add_y = [&](double y) {
            if (a.y == b.y) return;
            double t = (y - a.y) / (b.y - a.y);
            if (t < -1e-12 || t > 1 + 1e-12) return;
            double x = a.x + t * (b.x - a.x);
            if (x >= r.min_x() - kBoundaryTol && x <= r.max_x() + kBoundaryTol) ts.push_back(t);
        };
        add_x(r.min_x());
        add_x(r.max_x());
        add_y(r.min_y());
        add_y(r.max_y());
        // a segment running along a boundary line meets it at its first point on the rect
        if (r.on_boundary(a, kBoundaryTol)) ts.push_back(0.0);
        std::sort(ts.begin(), ts.end());
        for (double t : ts) {
            t = std::clamp(t, 0.0, 1.0);
            RouteCursor c{s, t};
            bool after = strict ? (from < c && (c.segment != from.segment || c.t - from.t > 1e-12))
                                : !(c < from);
            if (!after) continue;
            return std::make_pair(c, a + (b - a) * t);
        }
    }
    return std::nullopt;
}

enum class BoundaryLine { Left, Right, Top, Bottom };

std::vector<BoundaryLine> lines_of(const Rect& r, const Point& p)
{
    std::vector<BoundaryLine> out;
    if (std::abs(p.x - r.min_x()) <= kBoundaryTol) out.push_back(BoundaryLine::Left);
    if (std::abs(p.x - r.max_x()) <= kBoundaryTol) out.push_back(BoundaryLine::Right);
    if (std::abs(p.y - r.min_y()) <= kBoundaryTol) out.push_back(BoundaryLine::Top);
    if (std::abs(p.y - r.max_y()) <= kBoundaryTol) out.push_back(BoundaryLine::Bottom);
    return out;
}

/// Orthogonal walk along the boundary of r between two boundary points.
Polyline boundary_walk(const Rect& r, const Point& from, const Point& to)
{
    auto la = lines_of(r, from), lb = lines_of(r, to);
    for (auto a : la)
        for (auto b : lb)
            if (a == b) return {from, to};
    const Point corners[4] = {{r.min_x(), r.min_y()}, {r.max_x(), r.min_y()},
                              {r.max_x(), r.max_y()}, {r.min_x(), r.max_y()}};
    Polyline best;
    double best_len = std::numeric_limits<double>::infinity();
    auto shares = [](const std::vector<BoundaryLine>& x, const std::vector<BoundaryLine>& y) {
        for (auto a : x)
            if (std::find(y.begin(), y.end(), a) != y.end()) return true;
        return false;
    };
    for (const Point& c : corners) {
        auto lc = lines_of(r, c);
        if (shares(la, lc) && shares(lb, lc)) {
            Polyline p{from, c, to};
            if (polyline_length(p) < best_len) best_len = polyline_length(p), best = p;
        }
    }
    if (!best.empty()) return best;
    for (const Point& c1 : corners) {
        for (const Point& c2 : corners) {
            auto l1 = lines_of(r, c1), l2 = lines_of(r, c2);
            if (shares(la, l1) && shares(lb, l2) && shares(l1, l2) && !(c1 == c2)) {
                Polyline p{from, c1, c2, to};
                if (polyline_length(p) < best_len) best_len = polyline_length(p), best = p;
            }
        }
    }
    return best.empty() ? Polyline{from, to} : best;
}

Polyline tidy(Polyline pts)
{
    Polyline out;
    for (const Point& p : pts) {
        if (!out.empty() && out.back() == p) continue;
        if (out.size() >= 2) {
            const Point& a = out[out.size() - 2];
            const Point& b = out.back();
            if ((a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y)) {
                out.back() = p;
                continue;
            }
        }
        out.push_back(p);
    }
    if (out.size() == 1) out.push_back(out.front());
    return out;
}

}  // namespace

Layout back_map(const AuxGraph& aux, const FlatLayout& flat)
{
    const auto& g = aux.graph;
    Layout out;
    out.resize(g.nodes.size(), g.ports.size(), g.edges.size());

    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (g.is_atomic(n)) {
            if (n < flat.positions.size()) out.positions[n] = flat.positions[n];
        } else if (n < flat.cluster_rects.size() && flat.cluster_rects[n]) {
            out.cluster_rects[n] = flat.cluster_rects[n];
            out.positions[n] = flat.cluster_rects[n]->centre;
        }
    }
    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        if (!g.is_atomic(g.port_parent(p))) continue;
        std::size_t d = aux.dummy_of(p);
        if (d < flat.positions.size()) out.dummies[p] = flat.positions[d];
        if (p < flat.pins.size()) out.pins[p] = flat.pins[p];
    }

    auto cluster_of_port = [&](PortIndex p) -> const Rect& {
        NodeIndex c = g.port_parent(p);
        if (!out.cluster_rects[c])
            throw LayoutError("compound node '" + g.nodes[c].id + "' has no cluster rectangle");
        return *out.cluster_rects[c];
    };

    for (std::size_t f = 0; f < aux.flat_edges.size(); ++f) {
        const FlatEdge& fe = aux.flat_edges[f];
        if (f >= flat.routes.size() || !flat.routes[f]) continue;
        const Polyline& route = *flat.routes[f];
        if (!fe.hierarchical()) {
            out.routes[fe.chain.front()] = route;
            continue;
        }
        // split points, one per interior (hierarchical) port
        std::vector<std::pair<RouteCursor, Point>> cuts;
        RouteCursor cursor{0, 0.0};
        std::optional<NodeIndex> last_cluster;
        for (std::size_t i = 0; i + 1 < fe.chain.size(); ++i) {
            PortIndex hp = g.edge_target(fe.chain[i]);
            NodeIndex cluster = g.port_parent(hp);
            bool strict = !cuts.empty() && last_cluster == cluster;
            auto hit = next_boundary_hit(route, cluster_of_port(hp), cursor, strict);
            if (!hit)
                throw LayoutError("route of edge '" + g.edges[fe.chain.front()].id +
                                  "' does not cross the boundary of '" + g.nodes[cluster].id + "'");
            cuts.push_back(*hit);
            cursor = hit->first;
            last_cluster = cluster;
        }
        // pieces between consecutive cuts
        for (std::size_t i = 0; i < fe.chain.size(); ++i) {
            EdgeIndex e = fe.chain[i];
            Polyline piece;
            RouteCursor begin = i == 0 ? RouteCursor{0, 0.0} : cuts[i - 1].first;
            Point start = i == 0 ? route.front() : cuts[i - 1].second;
            Point end = i + 1 == fe.chain.size() ? route.back() : cuts[i].second;
            std::size_t end_seg = i + 1 == fe.chain.size() ? route.size() - 1 : cuts[i].first.segment + 1;
            piece.push_back(start);
            for (std::size_t k = begin.segment + 1; k < end_seg && k < route.size(); ++k) piece.push_back(route[k]);
            piece.push_back(end);

            if (out.routes[e]) continue;  // shared prefix of a fan-out, already assigned
            PortIndex sp = g.edge_source(e), tp = g.edge_target(e);
            if (i > 0) {
                if (out.pins[sp] && !(*out.pins[sp] == start)) {
                    Polyline walk = boundary_walk(cluster_of_port(sp), *out.pins[sp], start);
                    piece.insert(piece.begin(), walk.begin(), walk.end() - 1);
                } else {
                    out.pins[sp] = start;
                }
            }
            if (i + 1 < fe.chain.size()) {
                if (out.pins[tp] && !(*out.pins[tp] == end)) {
                    Polyline walk = boundary_walk(cluster_of_port(tp), end, *out.pins[tp]);
                    piece.insert(piece.end(), walk.begin() + 1, walk.end());
                } else {
                    out.pins[tp] = end;
                }
            }
            out.routes[e] = tidy(std::move(piece));
        }
    }

    // hierarchical ports no route touched
    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        NodeIndex owner = g.port_parent(p);
        if (g.is_atomic(owner) || !out.cluster_rects[owner]) continue;
        if (!out.pins[p]) out.pins[p] = default_pin(g.ports[p], g.nodes[owner], *out.cluster_rects[owner]);
        auto side = side_of_point(out.cluster_rects[owner]->inflated(1e-9), *out.pins[p]);
        Point normal = side_normal(side.value_or(Side::Right));
        if (!side) {
            const Rect& r = *out.cluster_rects[owner];
            Point d = *out.pins[p] - r.centre;
            double ex = std::abs(d.x) - r.width / 2, ey = std::abs(d.y) - r.height / 2;
            normal = ex >= ey ? Point{d.x >= 0 ? 1.0 : -1.0, 0} : Point{0, d.y >= 0 ? 1.0 : -1.0};
        }
        out.dummies[p] = *out.pins[p] + normal * (aux.dummy_size / 2);
    }
    return out;
}

}  // namespace portflow
