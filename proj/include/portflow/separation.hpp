#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "portflow/geometry.hpp"
#include "portflow/graph.hpp"

namespace portflow {

inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIdempotenceTol = 1e-9;

struct Variable {
    double desired = 0.0;
    double weight = 1.0;
    double position = 0.0;
};

/// left + gap <= right, or left + gap == right for equalities.
struct SeparationConstraint {
    std::size_t left = 0;
    std::size_t right = 0;
    double gap = 0.0;
    bool equality = false;
};

class InfeasibleError : public LayoutError {
public:
    InfeasibleError(const std::string& what, std::vector<SeparationConstraint> cycle)
        : LayoutError(what), cycle_(std::move(cycle))
    {
    }
    const std::vector<SeparationConstraint>& cycle() const { return cycle_; }

private:
    std::vector<SeparationConstraint> cycle_;
};

/// Minimizes sum w_i (x_i - d_i)^2 subject to the constraints. Throws InfeasibleError
/// with an offending constraint cycle when the system has no solution.
std::vector<double> project(std::span<const Variable> vars,
                            std::span<const SeparationConstraint> cons);

/// Convenience overload: unit weights, desired positions given directly.
std::vector<double> project(std::span<const double> desired,
                            std::span<const SeparationConstraint> cons);

/// Whether some assignment satisfies every constraint (longest-path check on the
/// constraint graph; equalities count as a pair of inequalities).
bool is_satisfiable(std::span<const SeparationConstraint> cons);
bool is_satisfiable(std::size_t var_count, std::span<const SeparationConstraint> cons);

/// A positive-weight cycle in the constraint graph, empty when the system is feasible.
std::vector<SeparationConstraint> find_infeasible_cycle(std::size_t var_count,
                                                        std::span<const SeparationConstraint> cons);

/// Largest violation max(0, left + gap - right) (absolute difference for equalities).
double max_violation(std::span<const double> x, std::span<const SeparationConstraint> cons);

struct AxisConstraints {
    std::vector<SeparationConstraint> x;
    std::vector<SeparationConstraint> y;

    void append(const AxisConstraints& o)
    {
        x.insert(x.end(), o.x.begin(), o.x.end());
        y.insert(y.end(), o.y.begin(), o.y.end());
    }
    std::vector<SeparationConstraint>& on(Axis a) { return a == Axis::X ? x : y; }
    const std::vector<SeparationConstraint>& on(Axis a) const { return a == Axis::X ? x : y; }
};

/// One side of a box along an axis: the coordinate is value(var) + offset.
struct BoxEdge {
    std::size_t var = 0;
    double offset = 0.0;
};

/// Axis-aligned box whose extent per axis is defined by two variable-relative edges.
/// Node boxes share one centre variable for both edges; cluster boxes use a
/// min and a max boundary variable.
struct Box {
    BoxEdge lo[2];
    BoxEdge hi[2];

    static Box node(std::size_t var_x, std::size_t var_y, double half_w, double half_h)
    {
        return {{{var_x, -half_w}, {var_y, -half_h}}, {{var_x, half_w}, {var_y, half_h}}};
    }
    static Box cluster(std::size_t min_x, std::size_t max_x, std::size_t min_y, std::size_t max_y)
    {
        return {{{min_x, 0}, {min_y, 0}}, {{max_x, 0}, {max_y, 0}}};
    }
    double low(Axis a, std::span<const double> v) const
    {
        const auto& e = lo[static_cast<int>(a)];
        return v[e.var] + e.offset;
    }
    double high(Axis a, std::span<const double> v) const
    {
        const auto& e = hi[static_cast<int>(a)];
        return v[e.var] + e.offset;
    }
};

/// How much each axis must move to separate two boxes by `spacing` (<= 0: already apart).
double separation_need(const Box& a, const Box& b, Axis axis, std::span<const double> xs,
                       std::span<const double> ys, double spacing);

/// The constraint placing `first` before `second` along `axis` with `spacing` between them.
SeparationConstraint separate(const Box& first, const Box& second, Axis axis, double spacing);

/// Constraint separating a pair of boxes along the axis needing the least displacement
/// (ties go to x); the box whose centre comes first along the axis goes first.
std::pair<Axis, SeparationConstraint> least_displacement_separation(
    const Box& a, const Box& b, std::span<const double> xs, std::span<const double> ys,
    double spacing);

/// Non-overlap constraints for rectangles (variable i is rectangle i's centre). A pair
/// gets one constraint when its rectangles overlap or are closer than `spacing` on both
/// axes; pairs further apart than spacing + horizon are skipped. Pass an infinite
/// horizon to constrain every pair.
AxisConstraints generate_nonoverlap(std::span<const Rect> rects, double spacing,
                                    double horizon = 0.0);

struct ClusterMember {
    std::size_t var_x = 0;
    std::size_t var_y = 0;
    double half_w = 0.0;
    double half_h = 0.0;
};

struct ClusterSpec {
    std::string id;
    std::size_t min_x = 0, max_x = 0, min_y = 0, max_y = 0;  // boundary variables
    std::vector<ClusterMember> members;
    std::vector<const ClusterSpec*> children;  // nested clusters
    double padding = 0.0;
};

/// Containment constraints keeping members (and nested clusters) inside the cluster
/// boundary variables with the given padding.
AxisConstraints cluster_constraints(const ClusterSpec& spec);

/// Throws GraphError when a member variable appears in two sibling clusters.
void check_cluster_membership(std::span<const ClusterSpec> siblings);

}  // namespace portflow
