#include "portflow/aligner.hpp"

#include <algorithm>
#include <cmath>

namespace portflow {

const char* to_string(AlignOutcome o)
{
    switch (o) {
    case AlignOutcome::Accepted: return "accepted";
    case AlignOutcome::RejectedInfeasible: return "infeasible";
    case AlignOutcome::RejectedOverlap: return "overlap";
    }
    return "?";
}

std::vector<AlignmentCandidate> collect_candidates(const FlatLayout& layout, const AuxGraph& aux)
{
    std::vector<AlignmentCandidate> out;
    for (std::size_t k = 0; k < aux.flat_edges.size(); ++k) {
        const auto& fe = aux.flat_edges[k];
        const auto& s = layout.positions.at(fe.source_dummy);
        const auto& t = layout.positions.at(fe.target_dummy);
        if (!s || !t) throw LayoutError("alignment needs positions for every port dummy");
        out.push_back({k, std::abs(s->y - t->y)});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const AlignmentCandidate& a, const AlignmentCandidate& b) { return a.dy < b.dy; });
    return out;
}

Aligner::Aligner(const AuxGraph& aux, const StressConfig& cfg, const FlatLayout& layout) : model_(aux, cfg)
{
    model_.load(layout, xs_, ys_);
    const double spacing = cfg.spacing;
    standing_ = model_.port_constraints(model_.current_sides(xs_, ys_)).y;
    auto clusters = model_.cluster_constraints().y;
    standing_.insert(standing_.end(), clusters.begin(), clusters.end());
    structural_ = standing_;
    // x is frozen, so only pairs whose x extents come within spacing need a vertical order
    for (const auto& boxes : model_.sibling_boxes()) {
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                if (separation_need(boxes[i], boxes[j], Axis::X, xs_, ys_, spacing) <= 0) continue;
                double ci = (boxes[i].low(Axis::Y, ys_) + boxes[i].high(Axis::Y, ys_)) / 2;
                double cj = (boxes[j].low(Axis::Y, ys_) + boxes[j].high(Axis::Y, ys_)) / 2;
                standing_.push_back(ci <= cj ? separate(boxes[i], boxes[j], Axis::Y, spacing)
                                             : separate(boxes[j], boxes[i], Axis::Y, spacing));
            }
        }
    }
    ys_ = project(ys_, standing_);
}

std::vector<SeparationConstraint> Aligner::alignment(std::size_t k) const
{
    const AuxGraph& aux = model_.aux();
    const auto& fe = aux.flat_edges[k];
    std::size_t s = model_.work().work_of[fe.source_dummy], t = model_.work().work_of[fe.target_dummy];
    std::size_t ns = model_.node_var(aux.owner(fe.source_dummy)), nt = model_.node_var(aux.owner(fe.target_dummy));
    return {{ns, s, ys_[s] - ys_[ns], true}, {nt, t, ys_[t] - ys_[nt], true}, {s, t, 0.0, true}};
}

std::vector<SeparationConstraint> Aligner::ghost_constraints(std::size_t k, std::size_t ghost) const
{
    const AuxGraph& aux = model_.aux();
    const auto& g = aux.graph;
    const auto& fe = aux.flat_edges[k];
    std::size_t s = model_.work().work_of[fe.source_dummy], t = model_.work().work_of[fe.target_dummy];
    NodeIndex os = aux.owner(fe.source_dummy), ot = aux.owner(fe.target_dummy);
    const double clearance = model_.config().spacing / 2, ds = aux.dummy_size;
    const double lo = std::min(xs_[s], xs_[t]) - clearance, hi = std::max(xs_[s], xs_[t]) + clearance;
    const double level = (ys_[s] + ys_[t]) / 2;
    std::vector<SeparationConstraint> out{{s, ghost, 0.0, true}};
    for (NodeIndex m = 0; m < g.nodes.size(); ++m) {
        if (!g.is_atomic(m) || m == os || m == ot) continue;
        std::size_t v = model_.node_var(m);
        double hw = g.nodes[m].width / 2 + ds, hh = g.nodes[m].height / 2 + ds;
        if (xs_[v] + hw <= lo || xs_[v] - hw >= hi) continue;
        if (ys_[v] <= level)
            out.push_back({v, ghost, hh + clearance, false});
        else
            out.push_back({ghost, v, hh + clearance, false});
    }
    return out;
}

AlignOutcome Aligner::try_align(const AlignmentCandidate& c)
{
    auto eq = alignment(c.flat_edge);
    std::vector<SeparationConstraint> core = structural_;
    core.insert(core.end(), eq.begin(), eq.end());
    if (!is_satisfiable(ys_.size(), core)) return AlignOutcome::RejectedInfeasible;
    std::vector<SeparationConstraint> trial = standing_;
    trial.insert(trial.end(), eq.begin(), eq.end());
    std::size_t ghost = ys_.size();
    auto ghosts = ghost_constraints(c.flat_edge, ghost);
    trial.insert(trial.end(), ghosts.begin(), ghosts.end());
    if (!is_satisfiable(ys_.size() + 1, trial)) return AlignOutcome::RejectedOverlap;
    standing_ = std::move(trial);
    structural_ = std::move(core);
    ys_.push_back(ys_[model_.work().work_of[model_.aux().flat_edges[c.flat_edge].source_dummy]]);
    ys_ = project(ys_, standing_);
    return AlignOutcome::Accepted;
}

FlatLayout Aligner::layout() const
{
    auto xs = xs_, ys = ys_;
    model_.tighten_clusters(xs, ys);
    return model_.export_layout(xs, ys);
}

AlignResult align_layout(const FlatLayout& layout, const AuxGraph& aux, const StressConfig& cfg)
{
    cfg.validate();
    AlignResult res;
    Aligner a(aux, cfg, layout);
    res.stress_before = a.stress();
    for (const auto& c : collect_candidates(layout, aux)) {
        AlignOutcome o = a.try_align(c);
        if (o == AlignOutcome::Accepted)
            res.accepted.push_back(c.flat_edge);
        else
            res.rejected.push_back({c.flat_edge, o});
    }
    res.stress_after = a.stress();
    res.layout = a.layout();
    return res;
}

}  // namespace portflow
