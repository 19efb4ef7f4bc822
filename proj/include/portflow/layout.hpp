#pragma once

#include <optional>
#include <vector>

#include "portflow/geometry.hpp"

namespace portflow {

/// Geometry of a diagram, indexed like the DiagramGraph it belongs to.
struct Layout {
    std::vector<std::optional<Point>> positions;      // node centres
    std::vector<std::optional<Rect>> cluster_rects;   // compound nodes only
    std::vector<std::optional<Point>> dummies;        // port dummy centres
    std::vector<std::optional<Point>> pins;           // absolute port attachment points
    std::vector<std::optional<Polyline>> routes;      // per edge

    void resize(std::size_t nodes, std::size_t ports, std::size_t edges)
    {
        positions.resize(nodes);
        cluster_rects.resize(nodes);
        dummies.resize(ports);
        pins.resize(ports);
        routes.resize(edges);
    }
};

/// Geometry of the flattened graph: positions indexed by auxiliary node index
/// (proper nodes first, then one dummy per port), routes by flat edge index.
struct FlatLayout {
    std::vector<std::optional<Point>> positions;
    std::vector<std::optional<Rect>> cluster_rects;   // by graph node index
    std::vector<std::optional<Point>> pins;           // by port index
    std::vector<std::optional<Polyline>> routes;      // by flat edge index
};

}  // namespace portflow
