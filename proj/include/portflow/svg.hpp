#pragma once

#include <string>

#include "portflow/graph.hpp"
#include "portflow/layout.hpp"

namespace portflow {

struct SvgStyle {
    double margin = 20.0;
    double port_size = 4.0;
    double font_size = 10.0;
    bool labels = true;
};

/// Shortest decimal text that reads back as the same double.
std::string format_number(double v);

/// Nodes as labelled rectangles, clusters as enclosing rectangles, routes as polylines
/// with arrowheads, ports as small squares at their pins. Coordinates are the layout's
/// own (y grows downwards).
std::string emit_svg(const DiagramGraph& g, const Layout& layout, const SvgStyle& style = {});

}  // namespace portflow
