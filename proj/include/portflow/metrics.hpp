#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "portflow/aux_graph.hpp"
#include "portflow/layout.hpp"

namespace portflow {

/// Sum of squares over sum; throws on an empty list or non-positive values.
double contraharmonic_mean(std::span<const double> values);

/// Inputs of the ideal-length search: boundary distances of the edges and, for
/// non-adjacent connected pairs, their boundary distance and hop count.
struct LbarInput {
    std::vector<double> edge_b;
    std::vector<std::pair<double, int>> pairs;
};

/// P-stress as a function of a uniform ideal length l:
/// sum over edges of (1 - b/l)^2 plus sum over pairs of ((1 - b/(l p))^+)^2.
double stress_at(const LbarInput& in, double l);

struct LbarResult {
    double lbar = 0.0;
    double stress = 0.0;
    std::vector<double> candidates;  // every value that was evaluated
};

/// Global minimiser of stress_at via the closed-form interval candidates.
LbarResult optimal_ideal_length(const LbarInput& in);

/// Builds the search input from node positions: edges are the flat edges between
/// their owning atomic nodes (deduplicated, loops dropped).
LbarInput lbar_input(const FlatLayout& layout, const AuxGraph& aux);

/// Number of route pairs that meet anywhere except at pins both routes end on.
std::size_t count_crossings(std::span<const Polyline> routes);

struct BendStats {
    std::vector<std::size_t> per_edge;
    double mean = 0.0;
};
BendStats count_bends(std::span<const Polyline> routes);

struct MetricsReport {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::optional<double> lbar;
    std::optional<double> pstress_at_lbar;
    std::string edge_length_source;  // "route", "boundary" or "none"
    std::optional<double> edge_length_mean;
    std::optional<double> edge_length_variance;
    double width = 0.0;
    double height = 0.0;
    double area = 0.0;
    double aspect_ratio = 0.0;
    std::size_t crossings = 0;
    std::optional<double> bends_per_edge;
};

/// All layout-quality measures of a flat layout. Edge lengths come from routes when
/// every flat edge has one (and `prefer_routes`), otherwise from boundary distances.
MetricsReport summarize(const FlatLayout& layout, const AuxGraph& aux, bool prefer_routes = true);

}  // namespace portflow
