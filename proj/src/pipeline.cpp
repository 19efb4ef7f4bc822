#include "portflow/pipeline.hpp"

#include <chrono>
#include <sstream>

#include "portflow/model.hpp"
#include "portflow/router.hpp"

namespace portflow {

void PipelineConfig::validate() const
{
    stress.validate();
    if (!(dummy_size > 0)) throw LayoutError("dummy size must be positive");
    if (clearance && !(*clearance >= 0)) throw LayoutError("clearance must be non-negative");
    if (bend_penalty && !(*bend_penalty >= 0)) throw LayoutError("bend penalty must be non-negative");
}

Stages parse_stages(const std::string& text)
{
    if (text == "all") return {};
    Stages s{false, false, false};
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "position")
            s.position = true;
        else if (item == "align")
            s.align = true;
        else if (item == "route")
            s.route = true;
        else
            throw LayoutError("unknown stage '" + item + "' (expected position, align or route)");
    }
    if (!s.position && !s.align && !s.route) throw LayoutError("no stages selected");
    return s;
}

std::string to_string(const Stages& s)
{
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ',';
        out += name;
    };
    add(s.position, "position");
    add(s.align, "align");
    add(s.route, "route");
    return out;
}

FlatLayout input_layout(const AuxGraph& aux, const StressConfig& cfg)
{
    const auto& g = aux.graph;
    FlatLayout flat;
    flat.positions.resize(aux.node_count());
    flat.cluster_rects.resize(g.nodes.size());
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        const Node& node = g.nodes[n];
        if (g.is_atomic(n)) {
            if (!node.position) throw LayoutError("node '" + node.id + "' has no position and the position stage is off");
            flat.positions[n] = node.position;
        } else if (node.position) {
            flat.cluster_rects[n] = Rect{*node.position, node.width, node.height};
        }
    }
    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        NodeIndex n = g.port_parent(p);
        if (!g.is_atomic(n)) continue;
        const Port& port = g.ports[p];
        if (port.dummy_position) {
            flat.positions[aux.dummy_of(p)] = port.dummy_position;
        } else {
            Rect r = aux.rect(n, *flat.positions[n]);
            Point at = default_pin(port, g.nodes[n], r);
            Side s = side_of_point(r.inflated(1e-9), at).value_or(port.side.value_or(Side::Right));
            flat.positions[aux.dummy_of(p)] = at + side_normal(s) * (aux.dummy_size / 2);
        }
    }
    LayoutModel model(aux, cfg);
    std::vector<double> xs, ys;
    model.load(flat, xs, ys);
    return model.export_layout(xs, ys);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PipelineResult run_pipeline(const DiagramGraph& g, const PipelineConfig& cfg, const Stages& stages)
{
    cfg.validate();
    PipelineResult res;
    res.aux = flatten_compound(expand_ports(g, cfg.dummy_size));
    for (const auto& p : res.aux.created_ports) res.warnings.push_back("created free port '" + p + "'");
    for (const auto& w : res.aux.warnings) res.warnings.push_back(w.message);
    const AuxGraph& aux = res.aux;

    auto t0 = std::chrono::steady_clock::now();
    if (stages.position) {
        res.flat = position_nodes(aux, cfg.stress).layout;
        res.times.position = seconds_since(t0);
    } else {
        res.flat = input_layout(aux, cfg.stress);
    }

    if (stages.align) {
        t0 = std::chrono::steady_clock::now();
        auto a = align_layout(res.flat, aux, cfg.stress);
        res.flat = std::move(a.layout);
        res.aligned = a.accepted.size();
        res.rejected = std::move(a.rejected);
        res.times.align = seconds_since(t0);
    }

    if (stages.route) {
        t0 = std::chrono::steady_clock::now();
        auto scene = build_scene(res.flat, aux, cfg.clearance_value());
        auto routes = route_all(scene, aux, cfg.bend_penalty_value());
        res.flat.routes.assign(routes.begin(), routes.end());
        res.flat.pins.assign(aux.graph.ports.size(), std::nullopt);
        for (PortIndex p = 0; p < scene.pins.size(); ++p)
            if (scene.pins[p]) res.flat.pins[p] = scene.pins[p]->at;
        res.times.route = seconds_since(t0);
    }

    res.layout = back_map(aux, res.flat);
    return res;
}

}  // namespace portflow
