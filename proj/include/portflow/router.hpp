#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "portflow/aux_graph.hpp"
#include "portflow/layout.hpp"

namespace portflow {

struct Pin {
    Point at;
    Side exit = Side::Right;
    NodeIndex node = 0;
    Point stub;  // where the route leaves the node's clearance zone
};

/// Pin on `node` (the node rectangle) leaving through `exit`; the stub lies exactly on
/// the rectangle inflated by `clearance`.
Pin make_pin(const Rect& node, const Point& at, Side exit, NodeIndex n, double clearance);

struct RoutingScene {
    std::vector<Rect> obstacles;          // atomic nodes inflated by clearance
    std::vector<NodeIndex> obstacle_node;
    std::vector<std::optional<Pin>> pins;  // per port of an atomic node
    std::vector<double> xs, ys;           // interesting coordinates
    double clearance = 0.0;
};

/// Pins from the dummy positions of a flat layout: each dummy is snapped onto the side
/// of its parent it lies on (FixedPosition ports use their declared offset). Throws when
/// a dummy sits strictly inside its parent.
RoutingScene build_scene(const FlatLayout& layout, const AuxGraph& aux, double clearance);

Point exit_direction(Side s);

/// Length plus bend_penalty per direction change.
double route_cost(const Polyline& route, double bend_penalty);
std::size_t bend_count(const Polyline& route);

/// Cheapest orthogonal route between two pins over the lattice of interesting
/// coordinates, leaving and entering along the pins' exit directions. Throws
/// LayoutError naming `what` when no route exists.
Polyline route_edge(const RoutingScene& scene, const Pin& from, const Pin& to, double bend_penalty,
                    const std::string& what = "edge");

/// Routes every flat edge in index order, then nudges apart interior segments that
/// coincide with an earlier route.
std::vector<Polyline> route_all(const RoutingScene& scene, const AuxGraph& aux, double bend_penalty);

/// Removes repeated points and merges collinear runs.
Polyline simplify(Polyline pts);

}  // namespace portflow
