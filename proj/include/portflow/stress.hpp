#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "portflow/aux_graph.hpp"
#include "portflow/fas.hpp"
#include "portflow/layout.hpp"
#include "portflow/separation.hpp"

namespace portflow {

struct StressConfig {
    double ideal_length = 80.0;
    double flow_gap = 40.0;
    double spacing = 10.0;
    double convergence_tol = 1e-4;
    int max_iterations = 100;
    double degree_scale = 0.15;
    double cluster_padding = 10.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Ideal length of an inter-port edge whose endpoint owners have the given degrees.
double degree_ideal_length(const StressConfig& cfg, std::size_t deg_source, std::size_t deg_target);

/// An edge of the stress model. `hop` is its contribution to pairwise path lengths.
struct WeightedEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double ideal = 0.0;
    double hop = 0.0;
};

/// The part of G' (or of the flattened graph) that takes part in stage 1. Work indices
/// are dense; aux_of maps them back to auxiliary node indices.
struct WorkGraph {
    const AuxGraph* aux = nullptr;
    std::vector<std::size_t> aux_of;
    std::vector<std::size_t> work_of;       // per aux index; npos when absent
    std::vector<WeightedEdge> edges;         // inter-port edges first, then parent links
    std::vector<std::size_t> edge_flat;      // flat edge index per inter-port edge
    std::size_t inter_count = 0;
    std::vector<std::size_t> owner_degree;   // per aux proper node

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t size() const { return aux_of.size(); }
    Rect rect(std::size_t w, const Point& c) const { return aux->rect(aux_of[w], c); }
};

WorkGraph make_work_graph(const AuxGraph& aux, const StressConfig& cfg);

/// Pairwise terms: hop counts and desired distances for connected pairs.
struct PairTerms {
    std::size_t n = 0;
    std::vector<int> hops;          // n*n, -1 for different components
    std::vector<double> desired;    // n*n
    std::vector<WeightedEdge> edges;

    int hop(std::size_t u, std::size_t v) const { return hops[u * n + v]; }
    double distance(std::size_t u, std::size_t v) const { return desired[u * n + v]; }
    /// Pair weight; zero for unconnected pairs and pairs at zero desired distance.
    double weight(std::size_t u, std::size_t v) const
    {
        double d = distance(u, v);
        return hop(u, v) > 0 && d > 0 ? 1.0 / (d * d) : 0.0;
    }
};

PairTerms compute_pair_terms(std::size_t n, std::span<const WeightedEdge> edges);
PairTerms compute_pair_terms(const WorkGraph& work);

/// P-stress of rectangles with the given centres.
double pstress(std::span<const Rect> rects, const PairTerms& terms);

/// Edges of the digraph used for flow, withheld arcs, and the constraints themselves.
struct FlowConstraintSet {
    std::vector<SeparationConstraint> constraints;  // x axis, over work indices
    std::vector<std::size_t> retained;              // inter-port edge indices (WorkGraph::edges)
    std::vector<std::size_t> withheld;
};

/// FAS over the digraph of edge owners (self-loops always withheld); one flow
/// constraint source + g <= target per retained edge.
FlowConstraintSet build_flow_constraints(const WorkGraph& work, const StressConfig& cfg);

/// Dummy-to-parent constraints of one port. Variables are the work indices of the
/// node and its dummy; `free_side` picks the band used for Free ports.
AxisConstraints port_dummy_constraints(const Port& port, const Node& node, std::size_t node_var,
                                       std::size_t dummy_var, double dummy_size, Side free_side);

/// Ordering constraints between FixedOrder ports of one node. Throws GraphError on
/// duplicate ranks.
AxisConstraints port_order_constraints(const DiagramGraph& g, NodeIndex n,
                                       const std::vector<std::size_t>& dummy_var, double dummy_size);

/// Side a Free port currently faces; ports with no edges keep `current`.
Side choose_free_side(const Point& node_centre, std::span<const Point> neighbours, Side current);

struct RunStats {
    std::vector<double> stress;  // after each iteration, entry 0 is the start of the run
    int iterations = 0;
};

struct StageOneResult {
    FlatLayout layout;
    std::vector<RunStats> runs;
    FlowConstraintSet flow;
    std::vector<Side> free_sides;  // per port, the sides used in the last run
};

/// Stage 1: three majorization runs with cumulative constraints (ports; + flow;
/// + non-overlap and clusters). Throws InfeasibleError for contradictory port constraints.
StageOneResult position_nodes(const AuxGraph& aux, const StressConfig& cfg);

/// Centre-to-port-centre distance of a dummy sitting on `side` (or at its fixed offset).
double parent_link_length(const Port& port, const Node& node, double dummy_size);

}  // namespace portflow
