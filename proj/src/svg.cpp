#include "portflow/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace portflow {

std::string format_number(double v)
{
    if (v == 0) return "0";  // also folds -0
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

void rect_element(std::ostringstream& out, const Rect& r, const std::string& cls, const std::string& id)
{
    out << "  <rect class=\"" << cls << "\" data-id=\"" << escape(id) << "\" x=\"" << format_number(r.min_x())
        << "\" y=\"" << format_number(r.min_y()) << "\" width=\"" << format_number(r.width) << "\" height=\""
        << format_number(r.height) << "\"/>\n";
}

}  // namespace

std::string emit_svg(const DiagramGraph& g, const Layout& layout, const SvgStyle& style)
{
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    auto cover = [&](const Rect& r) {
        x0 = std::min(x0, r.min_x()), y0 = std::min(y0, r.min_y());
        x1 = std::max(x1, r.max_x()), y1 = std::max(y1, r.max_y());
    };
    std::vector<std::optional<Rect>> rects(g.nodes.size());
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (n < layout.cluster_rects.size() && layout.cluster_rects[n])
            rects[n] = layout.cluster_rects[n];
        else if (n < layout.positions.size() && layout.positions[n])
            rects[n] = Rect{*layout.positions[n], g.nodes[n].width, g.nodes[n].height};
        if (rects[n]) cover(*rects[n]);
    }
    for (const auto& r : layout.routes)
        if (r)
            for (const Point& p : *r) cover(Rect{p, 0, 0});
    if (x0 > x1) x0 = y0 = x1 = y1 = 0;
    x0 -= style.margin, y0 -= style.margin, x1 += style.margin, y1 += style.margin;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_number(x0) << ' ' << format_number(y0)
        << ' ' << format_number(x1 - x0) << ' ' << format_number(y1 - y0) << "\" width=\"" << format_number(x1 - x0)
        << "\" height=\"" << format_number(y1 - y0) << "\">\n";
    out << "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" "
           "markerHeight=\"8\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n";
    out << "  <style>.cluster{fill:#f4f4f8;stroke:#888}.node{fill:#fff;stroke:#222}.port{fill:#222}"
           ".route{fill:none;stroke:#2050a0}text{font-family:sans-serif;font-size:"
        << format_number(style.font_size) << "px}</style>\n";

    // clusters first, outermost first, so children paint on top
    std::vector<NodeIndex> order;
    for (NodeIndex n = 0; n < g.nodes.size(); ++n)
        if (g.is_compound(n) && rects[n]) order.push_back(n);
    auto depth = [&](NodeIndex n) {
        int d = 0;
        for (auto p = g.nodes[n].parent; p; p = g.nodes[g.node_index(*p)].parent) ++d;
        return d;
    };
    std::stable_sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return depth(a) < depth(b); });
    for (NodeIndex n : order) rect_element(out, *rects[n], "cluster", g.nodes[n].id);
    for (NodeIndex n = 0; n < g.nodes.size(); ++n)
        if (g.is_atomic(n) && rects[n]) rect_element(out, *rects[n], "node", g.nodes[n].id);

    for (EdgeIndex e = 0; e < g.edges.size() && e < layout.routes.size(); ++e) {
        if (!layout.routes[e]) continue;
        out << "  <polyline class=\"route\" data-id=\"" << escape(g.edges[e].id) << "\" points=\"";
        const auto& pts = *layout.routes[e];
        for (std::size_t i = 0; i < pts.size(); ++i)
            out << (i ? " " : "") << format_number(pts[i].x) << ',' << format_number(pts[i].y);
        out << "\" marker-end=\"url(#arrow)\"/>\n";
    }

    for (PortIndex p = 0; p < g.ports.size() && p < layout.pins.size(); ++p) {
        if (!layout.pins[p]) continue;
        Rect r{*layout.pins[p], style.port_size, style.port_size};
        rect_element(out, r, "port", g.ports[p].id);
    }

    if (style.labels) {
        for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
            if (!rects[n]) continue;
            const Rect& r = *rects[n];
            bool atomic = g.is_atomic(n);
            double y = atomic ? r.centre.y + style.font_size / 3 : r.min_y() + style.font_size;
            double x = atomic ? r.centre.x : r.min_x() + 3;
            out << "  <text x=\"" << format_number(x) << "\" y=\"" << format_number(y) << "\""
                << (atomic ? " text-anchor=\"middle\"" : "") << ">" << escape(g.nodes[n].label) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace portflow
