#include "portflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "portflow/router.hpp"

namespace portflow {

double contraharmonic_mean(std::span<const double> values)
{
    if (values.empty()) throw LayoutError("contraharmonic mean of an empty list");
    double s = 0, s2 = 0;
    for (double v : values) {
        if (!(v > 0)) throw LayoutError("contraharmonic mean needs positive values");
        s += v;
        s2 += v * v;
    }
    return s2 / s;
}

double stress_at(const LbarInput& in, double l)
{
    double s = 0;
    for (double b : in.edge_b) s += (1 - b / l) * (1 - b / l);
    for (auto [b, p] : in.pairs) {
        double t = 1 - b / (l * p);
        if (t > 0) s += t * t;
    }
    return s;
}

LbarResult optimal_ideal_length(const LbarInput& in)
{
    if (in.edge_b.empty()) throw LayoutError("ideal edge length is undefined for a graph without edges");
    std::vector<double> ls;
    for (auto [b, p] : in.pairs) ls.push_back(b / p);
    std::sort(ls.begin(), ls.end());
    std::vector<double> m = ls;
    m.erase(std::unique(m.begin(), m.end()), m.end());

    double sb = 0, sb2 = 0;
    for (double b : in.edge_b) sb += b, sb2 += b * b;

    LbarResult res;
    // j = 0 has no active pair terms; interval j spans [m_j, m_{j+1}] with pairs l_i <= m_j active
    double sa = 0, sa2 = 0;
    std::size_t taken = 0;
    for (std::size_t j = 0; j <= m.size(); ++j) {
        if (j > 0) {
            while (taken < ls.size() && ls[taken] <= m[j - 1]) sa += ls[taken], sa2 += ls[taken] * ls[taken], ++taken;
        }
        double lo = j == 0 ? 0.0 : m[j - 1];
        double hi = j < m.size() ? m[j] : std::numeric_limits<double>::infinity();
        double den = sb + sa;
        if (den > 0) {
            double lambda = (sb2 + sa2) / den;
            if (lambda > 0 && lambda >= lo && lambda <= hi) res.candidates.push_back(lambda);
        }
    }
    for (double v : m)
        if (v > 0) res.candidates.push_back(v);
    if (res.candidates.empty()) res.candidates.push_back(1.0);  // every term is constant in l
    res.stress = std::numeric_limits<double>::infinity();
    for (double c : res.candidates) {
        double s = stress_at(in, c);
        if (s < res.stress || (s == res.stress && c < res.lbar)) res.stress = s, res.lbar = c;
    }
    return res;
}

LbarInput lbar_input(const FlatLayout& layout, const AuxGraph& aux)
{
    const auto& g = aux.graph;
    std::vector<NodeIndex> atoms;
    std::vector<std::size_t> local(g.nodes.size(), std::numeric_limits<std::size_t>::max());
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (!g.is_atomic(n)) continue;
        if (n >= layout.positions.size() || !layout.positions[n])
            throw LayoutError("node '" + g.nodes[n].id + "' has no position");
        local[n] = atoms.size();
        atoms.push_back(n);
    }
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& fe : aux.flat_edges) {
        std::size_t u = local[aux.owner(fe.source_dummy)], v = local[aux.owner(fe.target_dummy)];
        if (u == v) continue;
        edges.insert({std::min(u, v), std::max(u, v)});
    }
    const std::size_t n = atoms.size();
    std::vector<Rect> rects;
    for (NodeIndex a : atoms) rects.push_back(aux.rect(a, *layout.positions[a]));
    std::vector<std::vector<std::size_t>> adj(n);
    LbarInput in;
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
        in.edge_b.push_back(boundary_distance(rects[u], rects[v]));
    }
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<int> hop(n, -1);
        hop[s] = 0;
        std::deque<std::size_t> q{s};
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            for (std::size_t v : adj[u])
                if (hop[v] < 0) hop[v] = hop[u] + 1, q.push_back(v);
        }
        for (std::size_t t = s + 1; t < n; ++t)
            if (hop[t] >= 2) in.pairs.push_back({boundary_distance(rects[s], rects[t]), hop[t]});
    }
    return in;
}

namespace {

struct Piece {
    double x0, x1, y0, y1;
    bool touches(const Piece& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
    bool holds(const Point& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

bool routes_cross(const Polyline& a, const Polyline& b)
{
    std::vector<Piece> pieces;
    for (std::size_t i = 1; i < a.size(); ++i) {
        for (std::size_t j = 1; j < b.size(); ++j) {
            Piece p{std::max(std::min(a[i - 1].x, a[i].x), std::min(b[j - 1].x, b[j].x)),
                    std::min(std::max(a[i - 1].x, a[i].x), std::max(b[j - 1].x, b[j].x)),
                    std::max(std::min(a[i - 1].y, a[i].y), std::min(b[j - 1].y, b[j].y)),
                    std::min(std::max(a[i - 1].y, a[i].y), std::max(b[j - 1].y, b[j].y))};
            if (p.x0 <= p.x1 && p.y0 <= p.y1) pieces.push_back(p);
        }
    }
    if (pieces.empty()) return false;
    std::vector<Point> shared;
    for (const Point& e : {a.front(), a.back()})
        if (e == b.front() || e == b.back()) shared.push_back(e);
    if (shared.empty()) return true;
    // pieces connected to a shared pin are where the two routes leave that pin together
    std::vector<bool> excused(pieces.size(), false);
    std::deque<std::size_t> q;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        for (const Point& s : shared) {
            if (!excused[k] && pieces[k].holds(s)) {
                excused[k] = true;
                q.push_back(k);
            }
        }
    }
    while (!q.empty()) {
        std::size_t k = q.front();
        q.pop_front();
        for (std::size_t o = 0; o < pieces.size(); ++o)
            if (!excused[o] && pieces[k].touches(pieces[o])) excused[o] = true, q.push_back(o);
    }
    return std::find(excused.begin(), excused.end(), false) != excused.end();
}

}  // namespace

std::size_t count_crossings(std::span<const Polyline> routes)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < routes.size(); ++i)
        for (std::size_t j = i + 1; j < routes.size(); ++j)
            if (!routes[i].empty() && !routes[j].empty() && routes_cross(routes[i], routes[j])) ++n;
    return n;
}

BendStats count_bends(std::span<const Polyline> routes)
{
    BendStats st;
    std::size_t total = 0;
    for (const auto& r : routes) {
        st.per_edge.push_back(bend_count(r));
        total += st.per_edge.back();
    }
    st.mean = routes.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(routes.size());
    return st;
}

MetricsReport summarize(const FlatLayout& layout, const AuxGraph& aux, bool prefer_routes)
{
    const auto& g = aux.graph;
    MetricsReport rep;
    rep.edges = aux.flat_edges.size();
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    auto cover = [&](double ax, double ay, double bx, double by) {
        x0 = std::min(x0, ax), y0 = std::min(y0, ay), x1 = std::max(x1, bx), y1 = std::max(y1, by);
    };
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (g.is_atomic(n)) {
            ++rep.nodes;
            if (n >= layout.positions.size() || !layout.positions[n])
                throw LayoutError("node '" + g.nodes[n].id + "' has no position");
            Rect r = aux.rect(n, *layout.positions[n]);
            cover(r.min_x(), r.min_y(), r.max_x(), r.max_y());
        } else if (n < layout.cluster_rects.size() && layout.cluster_rects[n]) {
            const Rect& r = *layout.cluster_rects[n];
            cover(r.min_x(), r.min_y(), r.max_x(), r.max_y());
        }
    }
    std::vector<Polyline> routes;
    for (const auto& r : layout.routes) {
        if (!r) continue;
        routes.push_back(*r);
        for (const auto& p : *r) cover(p.x, p.y, p.x, p.y);
    }
    if (x0 <= x1) {
        rep.width = x1 - x0;
        rep.height = y1 - y0;
    }
    rep.area = rep.width * rep.height;
    rep.aspect_ratio = rep.height > 0 ? rep.width / rep.height : 0.0;

    auto in = lbar_input(layout, aux);
    if (!in.edge_b.empty()) {
        auto lb = optimal_ideal_length(in);
        rep.lbar = lb.lbar;
        rep.pstress_at_lbar = lb.stress;
    }

    std::vector<double> lengths;
    bool all_routed = !aux.flat_edges.empty() && routes.size() == aux.flat_edges.size();
    if (all_routed && prefer_routes) {
        rep.edge_length_source = "route";
        for (const auto& r : routes) lengths.push_back(polyline_length(r));
    } else if (!aux.flat_edges.empty()) {
        rep.edge_length_source = "boundary";
        for (const auto& fe : aux.flat_edges) {
            const auto& s = layout.positions.at(fe.source_dummy);
            const auto& t = layout.positions.at(fe.target_dummy);
            if (!s || !t) throw LayoutError("edge endpoints have no positions");
            lengths.push_back(boundary_distance(aux.rect(fe.source_dummy, *s), aux.rect(fe.target_dummy, *t)));
        }
    } else {
        rep.edge_length_source = "none";
    }
    if (!lengths.empty()) {
        double mean = 0;
        for (double l : lengths) mean += l;
        mean /= static_cast<double>(lengths.size());
        double var = 0;
        for (double l : lengths) var += (l - mean) * (l - mean);
        rep.edge_length_mean = mean;
        rep.edge_length_variance = var / static_cast<double>(lengths.size());
    }
    rep.crossings = count_crossings(routes);
    if (!routes.empty()) rep.bends_per_edge = count_bends(routes).mean;
    return rep;
}

}  // namespace portflow
