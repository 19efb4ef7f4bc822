#include "portflow/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace portflow {

namespace {

// direction codes: 0 = +x, 1 = -x, 2 = +y, 3 = -y
int dir_of(Side s)
{
    switch (s) {
    case Side::Right: return 0;
    case Side::Left: return 1;
    case Side::Bottom: return 2;
    case Side::Top: return 3;
    }
    return 0;
}
int opposite(int d) { return d ^ 1; }

void sort_unique(std::vector<double>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::size_t index_of(const std::vector<double>& v, double x)
{
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
}

/// Open intervals along one lattice line that lie inside some obstacle.
struct BlockedLine {
    std::vector<std::pair<double, double>> spans;  // sorted by start

    bool blocked(double a, double b) const
    {
        double mid = (a + b) / 2;
        for (const auto& [lo, hi] : spans) {
            if (lo >= mid) break;
            if (mid < hi) return true;
        }
        return false;
    }
};

bool segment_hits(const Point& a, const Point& b, const Rect& r)
{
    double x0 = std::min(a.x, b.x), x1 = std::max(a.x, b.x);
    double y0 = std::min(a.y, b.y), y1 = std::max(a.y, b.y);
    return x0 < r.max_x() && x1 > r.min_x() && y0 < r.max_y() && y1 > r.min_y();
}

bool collinear_overlap(const Point& a, const Point& b, const Point& c, const Point& d)
{
    if (a.y == b.y && c.y == d.y && a.y == c.y && a.x != b.x && c.x != d.x) {
        return std::min(std::max(a.x, b.x), std::max(c.x, d.x)) > std::max(std::min(a.x, b.x), std::min(c.x, d.x));
    }
    if (a.x == b.x && c.x == d.x && a.x == c.x && a.y != b.y && c.y != d.y) {
        return std::min(std::max(a.y, b.y), std::max(c.y, d.y)) > std::max(std::min(a.y, b.y), std::min(c.y, d.y));
    }
    return false;
}

}  // namespace

Point exit_direction(Side s) { return side_normal(s); }

Pin make_pin(const Rect& node, const Point& at, Side exit, NodeIndex n, double clearance)
{
    const Rect zone = node.inflated(clearance);
    Point stub = at;
    switch (exit) {
    case Side::Left: stub.x = zone.min_x(); break;
    case Side::Right: stub.x = zone.max_x(); break;
    case Side::Top: stub.y = zone.min_y(); break;
    case Side::Bottom: stub.y = zone.max_y(); break;
    }
    return {at, exit, n, stub};
}

RoutingScene build_scene(const FlatLayout& layout, const AuxGraph& aux, double clearance)
{
    if (!(clearance >= 0)) throw LayoutError("clearance must be non-negative");
    const auto& g = aux.graph;
    RoutingScene scene;
    scene.clearance = clearance;
    scene.pins.resize(g.ports.size());
    std::vector<std::optional<Rect>> node_rect(g.nodes.size());
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (!g.is_atomic(n)) continue;
        const auto& c = layout.positions.at(n);
        if (!c) throw LayoutError("node '" + g.nodes[n].id + "' has no position to route around");
        node_rect[n] = aux.rect(n, *c);
        scene.obstacles.push_back(node_rect[n]->inflated(clearance));
        scene.obstacle_node.push_back(n);
    }
    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        NodeIndex n = g.port_parent(p);
        if (!node_rect[n]) continue;
        const Rect& r = *node_rect[n];
        const Port& port = g.ports[p];
        const auto& d = layout.positions.at(aux.dummy_of(p));
        if (!d) throw LayoutError("port '" + port.id + "' has no dummy position");
        if (port.constraint == PortConstraint::FixedPosition && port.fixed_offset) {
            Point at = r.centre + *port.fixed_offset;
            Side s = side_of_point(r, at).value_or(Side::Right);
            scene.pins[p] = make_pin(r, at, s, n, clearance);
            continue;
        }
        auto side = side_of_point(r, *d);
        if (!side) throw LayoutError("dummy of port '" + port.id + "' lies inside its node");
        Point at{std::clamp(d->x, r.min_x(), r.max_x()), std::clamp(d->y, r.min_y(), r.max_y())};
        switch (*side) {
        case Side::Left: at.x = r.min_x(); break;
        case Side::Right: at.x = r.max_x(); break;
        case Side::Top: at.y = r.min_y(); break;
        case Side::Bottom: at.y = r.max_y(); break;
        }
        scene.pins[p] = make_pin(r, at, *side, n, clearance);
    }
    for (const auto& o : scene.obstacles) {
        scene.xs.push_back(o.min_x());
        scene.xs.push_back(o.max_x());
        scene.ys.push_back(o.min_y());
        scene.ys.push_back(o.max_y());
    }
    sort_unique(scene.xs);
    sort_unique(scene.ys);
    return scene;
}

std::size_t bend_count(const Polyline& route)
{
    std::size_t bends = 0;
    int prev = -1;
    for (std::size_t i = 1; i < route.size(); ++i) {
        Point d = route[i] - route[i - 1];
        if (d.x == 0 && d.y == 0) continue;
        int cur = d.x > 0 ? 0 : d.x < 0 ? 1 : d.y > 0 ? 2 : 3;
        if (prev >= 0 && cur != prev) ++bends;
        prev = cur;
    }
    return bends;
}

double route_cost(const Polyline& route, double bend_penalty)
{
    return polyline_length(route) + bend_penalty * static_cast<double>(bend_count(route));
}

Polyline simplify(Polyline pts)
{
    Polyline out;
    for (const auto& p : pts) {
        if (!out.empty() && out.back() == p) continue;
        if (out.size() >= 2) {
            const Point& a = out[out.size() - 2];
            const Point& b = out.back();
            bool same_x = a.x == b.x && b.x == p.x, same_y = a.y == b.y && b.y == p.y;
            bool forward = (same_x && (b.y - a.y) * (p.y - b.y) > 0) || (same_y && (b.x - a.x) * (p.x - b.x) > 0);
            if (forward) {
                out.back() = p;
                continue;
            }
        }
        out.push_back(p);
    }
    return out;
}

Polyline route_edge(const RoutingScene& scene, const Pin& from, const Pin& to, double bend_penalty,
                    const std::string& what)
{
    if (!(bend_penalty >= 0)) throw LayoutError("bend penalty must be non-negative");
    const Point s0 = from.stub, t0 = to.stub;
    std::vector<double> xs = scene.xs, ys = scene.ys;
    xs.push_back(s0.x);
    xs.push_back(t0.x);
    ys.push_back(s0.y);
    ys.push_back(t0.y);
    sort_unique(xs);
    sort_unique(ys);
    const std::size_t nx = xs.size(), ny = ys.size();

    std::vector<BlockedLine> rows(ny), cols(nx);
    for (const auto& o : scene.obstacles) {
        for (std::size_t j = index_of(ys, o.min_y()); j < ny && ys[j] < o.max_y(); ++j)
            if (ys[j] > o.min_y()) rows[j].spans.push_back({o.min_x(), o.max_x()});
        for (std::size_t i = index_of(xs, o.min_x()); i < nx && xs[i] < o.max_x(); ++i)
            if (xs[i] > o.min_x()) cols[i].spans.push_back({o.min_y(), o.max_y()});
    }
    for (auto& r : rows) std::sort(r.spans.begin(), r.spans.end());
    for (auto& c : cols) std::sort(c.spans.begin(), c.spans.end());

    const std::size_t si = index_of(xs, s0.x), sj = index_of(ys, s0.y);
    const std::size_t ti = index_of(xs, t0.x), tj = index_of(ys, t0.y);
    const int start_dir = dir_of(from.exit), end_dir = opposite(dir_of(to.exit));
    auto state = [&](std::size_t i, std::size_t j, int d) { return (i * ny + j) * 4 + static_cast<std::size_t>(d); };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nx * ny * 4, inf);
    std::vector<std::size_t> prev(nx * ny * 4, std::numeric_limits<std::size_t>::max());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[state(si, sj, start_dir)] = 0;
    pq.push({0.0, state(si, sj, start_dir)});
    double best = inf;
    std::size_t best_state = 0;
    while (!pq.empty()) {
        auto [d, st] = pq.top();
        pq.pop();
        if (d > dist[st] || d >= best) continue;
        int dir = static_cast<int>(st % 4);
        std::size_t j = (st / 4) % ny, i = st / 4 / ny;
        if (i == ti && j == tj && dir != opposite(end_dir)) {
            double total = d + (dir == end_dir ? 0.0 : bend_penalty);
            if (total < best) best = total, best_state = st;
        }
        for (int nd = 0; nd < 4; ++nd) {
            if (nd == opposite(dir)) continue;
            std::size_t ni = i, nj = j;
            if (nd == 0) {
                if (i + 1 >= nx || rows[j].blocked(xs[i], xs[i + 1])) continue;
                ni = i + 1;
            } else if (nd == 1) {
                if (i == 0 || rows[j].blocked(xs[i - 1], xs[i])) continue;
                ni = i - 1;
            } else if (nd == 2) {
                if (j + 1 >= ny || cols[i].blocked(ys[j], ys[j + 1])) continue;
                nj = j + 1;
            } else {
                if (j == 0 || cols[i].blocked(ys[j - 1], ys[j])) continue;
                nj = j - 1;
            }
            double step = std::abs(xs[ni] - xs[i]) + std::abs(ys[nj] - ys[j]) + (nd == dir ? 0.0 : bend_penalty);
            std::size_t ns = state(ni, nj, nd);
            if (d + step < dist[ns]) {
                dist[ns] = d + step;
                prev[ns] = st;
                pq.push({dist[ns], ns});
            }
        }
    }
    if (best == inf) throw LayoutError("no orthogonal route for " + what);
    Polyline pts{to.at};
    for (std::size_t st = best_state;; st = prev[st]) {
        std::size_t j = (st / 4) % ny, i = st / 4 / ny;
        pts.push_back({xs[i], ys[j]});
        if (prev[st] == std::numeric_limits<std::size_t>::max()) break;
    }
    pts.push_back(from.at);
    std::reverse(pts.begin(), pts.end());
    return simplify(pts);
}

std::vector<Polyline> route_all(const RoutingScene& scene, const AuxGraph& aux, double bend_penalty)
{
    const auto& g = aux.graph;
    std::vector<Polyline> routes;
    for (std::size_t k = 0; k < aux.flat_edges.size(); ++k) {
        const auto& fe = aux.flat_edges[k];
        PortIndex ps = aux.port_of(fe.source_dummy), pt = aux.port_of(fe.target_dummy);
        if (!scene.pins[ps] || !scene.pins[pt]) throw LayoutError("edge '" + g.edges[fe.chain.front()].id + "' has no pins");
        std::string what = "edge '" + g.edges[fe.chain.front()].id + "'";
        routes.push_back(route_edge(scene, *scene.pins[ps], *scene.pins[pt], bend_penalty, what));
    }

    // cosmetic nudging of interior segments that coincide with an earlier route
    const double step = scene.clearance / 2;
    if (step <= 0) return routes;
    std::vector<Rect> keep_out;
    for (const auto& o : scene.obstacles) keep_out.push_back(o.inflated(-step));
    auto clear = [&](const Point& a, const Point& b) {
        return std::none_of(keep_out.begin(), keep_out.end(), [&](const Rect& r) { return segment_hits(a, b, r); });
    };
    for (std::size_t r = 1; r < routes.size(); ++r) {
        Polyline& route = routes[r];
        for (std::size_t k = 1; k + 2 < route.size(); ++k) {
            auto coincides = [&](const Point& a, const Point& b) {
                for (std::size_t q = 0; q < r; ++q)
                    for (std::size_t m = 1; m < routes[q].size(); ++m)
                        if (collinear_overlap(a, b, routes[q][m - 1], routes[q][m])) return true;
                return false;
            };
            if (!coincides(route[k], route[k + 1])) continue;
            bool horizontal = route[k].y == route[k + 1].y;
            for (double off : {step, -step, 2 * step, -2 * step, 3 * step, -3 * step}) {
                Point a = route[k], b = route[k + 1];
                if (horizontal) a.y += off, b.y += off; else a.x += off, b.x += off;
                const Point& before = route[k - 1];
                const Point& after = route[k + 2];
                // neighbouring segments must keep their direction and a positive length
                auto same_way = [](const Point& p0, const Point& p1, const Point& q0, const Point& q1) {
                    Point d = p1 - p0, e = q1 - q0;
                    return d.x * e.x + d.y * e.y > 0;
                };
                if (!same_way(before, route[k], before, a) || !same_way(route[k + 1], after, b, after)) continue;
                if (!clear(before, a) || !clear(a, b) || !clear(b, after)) continue;
                if (coincides(a, b)) continue;
                route[k] = a;
                route[k + 1] = b;
                break;
            }
        }
    }
    return routes;
}

}  // namespace portflow
