#pragma once

#include <cstddef>
#include <vector>

#include "portflow/stress.hpp"

namespace portflow {

/// Variable layout shared by the optimisation stages: one variable per work node
/// (per axis), followed by a low/high boundary pair per compound node.
class LayoutModel {
public:
    LayoutModel(const AuxGraph& aux, const StressConfig& cfg);

    const AuxGraph& aux() const { return *aux_; }
    const DiagramGraph& graph() const { return aux_->graph; }
    const StressConfig& config() const { return cfg_; }
    const WorkGraph& work() const { return work_; }
    const PairTerms& terms() const { return terms_; }
    std::size_t size() const { return work_.size(); }
    std::size_t vars() const { return vars_; }
    const std::vector<NodeIndex>& clusters() const { return comps_; }  // deepest first
    std::size_t cluster_var(NodeIndex c) const { return cluster_var_[c]; }
    std::size_t dummy_var(PortIndex p) const { return dummy_var_[p]; }
    const std::vector<std::size_t>& dummy_vars() const { return dummy_var_; }
    std::size_t node_var(NodeIndex n) const { return work_.work_of[n]; }

    /// Box of a node used for non-overlap: atomic nodes grow by the dummy size so they
    /// cover their port dummies; compound nodes use their boundary variables.
    Box box_of(NodeIndex v) const;
    /// Children of the root and of each compound node with more than one member.
    const std::vector<std::vector<Box>>& sibling_boxes() const { return siblings_; }

    AxisConstraints port_constraints(const std::vector<Side>& free_sides) const;
    AxisConstraints cluster_constraints() const;
    /// Sides ports occupy at the given positions (declared sides for fixed ports).
    std::vector<Side> current_sides(const std::vector<double>& xs, const std::vector<double>& ys) const;

    /// Shrinks cluster boundaries to the padded bounding box of their contents.
    void tighten_clusters(std::vector<double>& xs, std::vector<double>& ys) const;

    std::vector<Rect> rects(const std::vector<double>& xs, const std::vector<double>& ys) const;
    double stress(const std::vector<double>& xs, const std::vector<double>& ys) const;

    /// Reads positions (and cluster rectangles) of a flat layout; throws when missing.
    void load(const FlatLayout& flat, std::vector<double>& xs, std::vector<double>& ys) const;
    FlatLayout export_layout(const std::vector<double>& xs, const std::vector<double>& ys) const;

private:
    const AuxGraph* aux_;
    StressConfig cfg_;
    WorkGraph work_;
    PairTerms terms_;
    std::size_t vars_ = 0;
    std::vector<NodeIndex> comps_;
    std::vector<std::size_t> cluster_var_;
    std::vector<std::size_t> dummy_var_;
    std::vector<std::vector<Box>> siblings_;
};

}  // namespace portflow
