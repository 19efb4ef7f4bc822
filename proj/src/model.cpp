#include "portflow/model.hpp"

#include <algorithm>
#include <cmath>

namespace portflow {

LayoutModel::LayoutModel(const AuxGraph& aux, const StressConfig& cfg)
    : aux_(&aux), cfg_(cfg), work_(make_work_graph(aux, cfg)), terms_(compute_pair_terms(work_))
{
    const auto& g = aux.graph;
    auto depth = [&](NodeIndex v) {
        int d = 0;
        for (auto p = g.node_parent(v); p; p = g.node_parent(*p)) ++d;
        return d;
    };
    for (NodeIndex v = 0; v < g.nodes.size(); ++v)
        if (g.is_compound(v)) comps_.push_back(v);
    // deepest clusters first so nested bounding boxes are ready before their parents
    std::stable_sort(comps_.begin(), comps_.end(), [&](NodeIndex a, NodeIndex b) { return depth(a) > depth(b); });
    cluster_var_.assign(g.nodes.size(), WorkGraph::npos);
    for (std::size_t k = 0; k < comps_.size(); ++k) cluster_var_[comps_[k]] = work_.size() + 2 * k;
    vars_ = work_.size() + 2 * comps_.size();
    dummy_var_.assign(g.ports.size(), WorkGraph::npos);
    for (PortIndex p = 0; p < g.ports.size(); ++p) dummy_var_[p] = work_.work_of[aux.dummy_of(p)];

    auto group = [&](const std::vector<NodeIndex>& members) {
        std::vector<Box> boxes;
        for (NodeIndex v : members) boxes.push_back(box_of(v));
        if (boxes.size() > 1) siblings_.push_back(std::move(boxes));
    };
    group(g.roots());
    for (NodeIndex c : comps_) group(g.children_of(c));
}

Box LayoutModel::box_of(NodeIndex v) const
{
    const auto& g = graph();
    if (g.is_compound(v)) {
        std::size_t c = cluster_var_[v];
        return Box::cluster(c, c + 1, c, c + 1);
    }
    const double ds = aux_->dummy_size;
    std::size_t w = work_.work_of[v];
    return Box::node(w, w, g.nodes[v].width / 2 + ds, g.nodes[v].height / 2 + ds);
}

AxisConstraints LayoutModel::port_constraints(const std::vector<Side>& free_sides) const
{
    const auto& g = graph();
    AxisConstraints cons;
    for (std::size_t w = 0; w < work_.size(); ++w) {
        std::size_t a = work_.aux_of[w];
        if (aux_->is_dummy(a)) continue;
        for (PortIndex p : g.ports_of(a))
            cons.append(port_dummy_constraints(g.ports[p], g.nodes[a], w, dummy_var_[p], aux_->dummy_size,
                                               free_sides[p]));
        cons.append(port_order_constraints(g, a, dummy_var_, aux_->dummy_size));
    }
    return cons;
}

AxisConstraints LayoutModel::cluster_constraints() const
{
    const auto& g = graph();
    const double ds = aux_->dummy_size;
    std::vector<ClusterSpec> specs(g.nodes.size());
    for (NodeIndex c : comps_) {
        ClusterSpec& spec = specs[c];
        spec.id = g.nodes[c].id;
        std::size_t v = cluster_var_[c];
        spec.min_x = spec.min_y = v;
        spec.max_x = spec.max_y = v + 1;
        spec.padding = cfg_.cluster_padding;
        for (NodeIndex ch : g.children_of(c)) {
            if (g.is_compound(ch)) {
                spec.children.push_back(&specs[ch]);
                continue;
            }
            std::size_t w = work_.work_of[ch];
            spec.members.push_back({w, w, g.nodes[ch].width / 2 + ds, g.nodes[ch].height / 2 + ds});
        }
    }
    AxisConstraints cons;
    for (NodeIndex c : comps_) cons.append(portflow::cluster_constraints(specs[c]));
    return cons;
}

std::vector<Side> LayoutModel::current_sides(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    const auto& g = graph();
    std::vector<Side> sides(g.ports.size(), Side::Right);
    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        const Port& port = g.ports[p];
        if (port.side) sides[p] = *port.side;
        std::size_t dv = dummy_var_[p];
        if (dv == WorkGraph::npos || port.constraint != PortConstraint::Free) continue;
        NodeIndex n = g.port_parent(p);
        std::size_t nv = work_.work_of[n];
        auto s = side_of_point(Rect{{xs[nv], ys[nv]}, g.nodes[n].width, g.nodes[n].height}, {xs[dv], ys[dv]});
        if (s) sides[p] = *s;
    }
    return sides;
}

void LayoutModel::tighten_clusters(std::vector<double>& xs, std::vector<double>& ys) const
{
    const auto& g = graph();
    const double pad = cfg_.cluster_padding;
    for (NodeIndex c : comps_) {
        std::size_t v = cluster_var_[c];
        double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
        bool any = false;
        for (NodeIndex ch : g.children_of(c)) {
            Box b = box_of(ch);
            for (Axis a : {Axis::X, Axis::Y}) {
                const auto& vals = a == Axis::X ? xs : ys;
                int i = static_cast<int>(a);
                lo[i] = std::min(lo[i], b.low(a, vals));
                hi[i] = std::max(hi[i], b.high(a, vals));
            }
            any = true;
        }
        if (!any) {
            xs[v + 1] = std::max(xs[v + 1], xs[v] + 2 * pad);
            ys[v + 1] = std::max(ys[v + 1], ys[v] + 2 * pad);
            continue;
        }
        xs[v] = lo[0] - pad;
        xs[v + 1] = hi[0] + pad;
        ys[v] = lo[1] - pad;
        ys[v + 1] = hi[1] + pad;
    }
}

std::vector<Rect> LayoutModel::rects(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    std::vector<Rect> out(work_.size());
    for (std::size_t w = 0; w < work_.size(); ++w) out[w] = work_.rect(w, {xs[w], ys[w]});
    return out;
}

double LayoutModel::stress(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    return pstress(rects(xs, ys), terms_);
}

void LayoutModel::load(const FlatLayout& flat, std::vector<double>& xs, std::vector<double>& ys) const
{
    xs.assign(vars_, 0.0);
    ys.assign(vars_, 0.0);
    for (std::size_t w = 0; w < work_.size(); ++w) {
        std::size_t a = work_.aux_of[w];
        if (a >= flat.positions.size() || !flat.positions[a])
            throw LayoutError("layout has no position for '" +
                              (aux_->is_dummy(a) ? graph().ports[aux_->port_of(a)].id : graph().nodes[a].id) + "'");
        xs[w] = flat.positions[a]->x;
        ys[w] = flat.positions[a]->y;
    }
    for (NodeIndex c : comps_) {
        std::size_t v = cluster_var_[c];
        if (c < flat.cluster_rects.size() && flat.cluster_rects[c]) {
            const Rect& r = *flat.cluster_rects[c];
            xs[v] = r.min_x();
            xs[v + 1] = r.max_x();
            ys[v] = r.min_y();
            ys[v + 1] = r.max_y();
        }
    }
    tighten_clusters(xs, ys);
}

FlatLayout LayoutModel::export_layout(const std::vector<double>& xs, const std::vector<double>& ys) const
{
    FlatLayout out;
    out.positions.resize(aux_->node_count());
    out.cluster_rects.resize(graph().nodes.size());
    out.pins.resize(graph().ports.size());
    out.routes.resize(aux_->flat_edges.size());
    for (std::size_t w = 0; w < work_.size(); ++w) out.positions[work_.aux_of[w]] = Point{xs[w], ys[w]};
    for (NodeIndex c : comps_) {
        std::size_t v = cluster_var_[c];
        out.cluster_rects[c] = Rect::from_bounds(xs[v], ys[v], xs[v + 1], ys[v + 1]);
    }
    return out;
}

}  // namespace portflow
