#include "portflow/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace portflow {

namespace {

class Reader {
public:
    explicit Reader(std::vector<std::string>& warnings) : warnings_(warnings) {}

    void check_fields(const Json& obj, const std::string& path, std::initializer_list<const char*> known)
    {
        if (!obj.is_object()) fail(path, "expected an object");
        std::set<std::string> ok(known.begin(), known.end());
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!ok.count(it.key())) warnings_.push_back("ignoring unknown field " + path + "." + it.key());
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what)
    {
        throw GraphError(path + ": " + what);
    }

    static std::string str(const Json& obj, const char* key, const std::string& path)
    {
        if (!obj.contains(key)) fail(path + "." + key, "missing");
        if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
        return obj[key].get<std::string>();
    }

    static std::optional<std::string> opt_str(const Json& obj, const char* key, const std::string& path)
    {
        if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
        return str(obj, key, path);
    }

    static double num(const Json& obj, const char* key, const std::string& path)
    {
        if (!obj.contains(key)) fail(path + "." + key, "missing");
        if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
        return obj[key].get<double>();
    }

    static std::optional<Point> opt_point(const Json& obj, const char* key, const std::string& path)
    {
        if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
        return point(obj[key], path + "." + key);
    }

    static Point point(const Json& v, const std::string& path)
    {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            fail(path, "expected [x, y]");
        return {v[0].get<double>(), v[1].get<double>()};
    }

    template <class F>
    static auto tagged(F parse, const std::string& tag, const std::string& path)
    {
        try {
            return parse(tag);
        } catch (const GraphError& e) {
            fail(path, e.what());
        }
    }

private:
    std::vector<std::string>& warnings_;
};

Json point_json(const Point& p) { return Json::array({p.x, p.y}); }

Json rect_json(const Rect& r) { return {{"x", r.centre.x}, {"y", r.centre.y}, {"width", r.width}, {"height", r.height}}; }

std::size_t line_of(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
    return line;
}

}  // namespace

ParsedGraph parse_graph(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw GraphError("JSON syntax error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    ParsedGraph out;
    Reader rd(out.warnings);
    const Json* body = &doc;
    if (doc.is_object() && doc.contains("graph")) {
        out.has_layout = true;
        rd.check_fields(doc, "document", {"graph", "layout", "metadata"});
        body = &doc["graph"];
    }
    const Json& j = *body;
    rd.check_fields(j, "graph", {"nodes", "ports", "edges", "hyperedges"});
    auto list = [&](const char* key) -> const Json& {
        static const Json empty = Json::array();
        if (!j.contains(key)) return empty;
        if (!j[key].is_array()) Reader::fail(key, "expected an array");
        return j[key];
    };

    DiagramGraph& g = out.graph;
    const Json& nodes = list("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Json& n = nodes[i];
        std::string path = "nodes[" + std::to_string(i) + "]";
        rd.check_fields(n, path, {"id", "width", "height", "parent", "kind", "label", "x", "y"});
        Node node;
        node.id = Reader::str(n, "id", path);
        path = "node '" + node.id + "'";
        node.width = Reader::num(n, "width", path);
        node.height = Reader::num(n, "height", path);
        node.parent = Reader::opt_str(n, "parent", path);
        if (auto k = Reader::opt_str(n, "kind", path)) node.kind = Reader::tagged(parse_node_kind, *k, path + ".kind");
        node.label = Reader::opt_str(n, "label", path).value_or(node.id);
        if (n.contains("x") || n.contains("y")) node.position = Point{Reader::num(n, "x", path), Reader::num(n, "y", path)};
        g.nodes.push_back(std::move(node));
    }
    const Json& ports = list("ports");
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const Json& p = ports[i];
        std::string path = "ports[" + std::to_string(i) + "]";
        rd.check_fields(p, path, {"id", "parent", "constraint", "side", "offset", "order", "dummy"});
        Port port;
        port.id = Reader::str(p, "id", path);
        path = "port '" + port.id + "'";
        port.parent = Reader::str(p, "parent", path);
        if (auto c = Reader::opt_str(p, "constraint", path))
            port.constraint = Reader::tagged(parse_port_constraint, *c, path + ".constraint");
        if (auto s = Reader::opt_str(p, "side", path)) port.side = Reader::tagged(parse_side, *s, path + ".side");
        port.fixed_offset = Reader::opt_point(p, "offset", path);
        if (p.contains("order") && !p["order"].is_null()) {
            if (!p["order"].is_number_integer()) Reader::fail(path + ".order", "expected an integer");
            port.declared_order = p["order"].get<int>();
        }
        port.dummy_position = Reader::opt_point(p, "dummy", path);
        g.ports.push_back(std::move(port));
    }
    const Json& edges = list("edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Json& e = edges[i];
        std::string path = "edges[" + std::to_string(i) + "]";
        rd.check_fields(e, path, {"id", "source_port", "target_port", "source_node", "target_node"});
        Edge edge;
        edge.id = Reader::str(e, "id", path);
        path = "edge '" + edge.id + "'";
        edge.source_port = Reader::opt_str(e, "source_port", path).value_or("");
        edge.target_port = Reader::opt_str(e, "target_port", path).value_or("");
        edge.source_node = Reader::opt_str(e, "source_node", path).value_or("");
        edge.target_node = Reader::opt_str(e, "target_node", path).value_or("");
        g.edges.push_back(std::move(edge));
    }
    const Json& hyper = list("hyperedges");
    for (std::size_t i = 0; i < hyper.size(); ++i) {
        std::string path = "hyperedges[" + std::to_string(i) + "]";
        if (!hyper[i].is_array()) Reader::fail(path, "expected an array of edge ids");
        std::vector<std::string> members;
        for (const auto& m : hyper[i]) {
            if (!m.is_string()) Reader::fail(path, "expected an array of edge ids");
            members.push_back(m.get<std::string>());
        }
        g.hyperedges.push_back(std::move(members));
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LayoutError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LayoutError("cannot write '" + path + "'");
    out << text;
}

ParsedGraph read_graph_file(const std::string& path)
{
    try {
        return parse_graph(read_file(path));
    } catch (const GraphError& e) {
        throw GraphError(path + ": " + e.what());
    }
}

Json graph_to_json(const DiagramGraph& g)
{
    Json nodes = Json::array(), ports = Json::array(), edges = Json::array(), hyper = Json::array();
    for (const Node& n : g.nodes) {
        Json o{{"id", n.id}, {"width", n.width}, {"height", n.height}, {"kind", to_string(n.kind)}};
        if (n.label != n.id) o["label"] = n.label;
        if (n.parent) o["parent"] = *n.parent;
        if (n.position) o["x"] = n.position->x, o["y"] = n.position->y;
        nodes.push_back(std::move(o));
    }
    for (const Port& p : g.ports) {
        Json o{{"id", p.id}, {"parent", p.parent}, {"constraint", to_string(p.constraint)}};
        if (p.side) o["side"] = to_string(*p.side);
        if (p.fixed_offset) o["offset"] = point_json(*p.fixed_offset);
        if (p.declared_order) o["order"] = *p.declared_order;
        if (p.dummy_position) o["dummy"] = point_json(*p.dummy_position);
        ports.push_back(std::move(o));
    }
    for (const Edge& e : g.edges) {
        Json o{{"id", e.id}};
        if (!e.source_port.empty()) o["source_port"] = e.source_port;
        if (!e.target_port.empty()) o["target_port"] = e.target_port;
        if (!e.source_node.empty()) o["source_node"] = e.source_node;
        if (!e.target_node.empty()) o["target_node"] = e.target_node;
        edges.push_back(std::move(o));
    }
    for (const auto& h : g.hyperedges) hyper.push_back(h);
    return {{"nodes", nodes}, {"ports", ports}, {"edges", edges}, {"hyperedges", hyper}};
}

Json layout_to_json(const PipelineResult& res, const PipelineConfig& cfg, const Stages& stages)
{
    const AuxGraph& aux = res.aux;
    const Layout& lay = res.layout;
    DiagramGraph g = aux.graph;
    Json nodes = Json::object(), clusters = Json::object(), ports = Json::object(), routes = Json::object();
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
        if (g.is_atomic(n) && lay.positions[n]) {
            g.nodes[n].position = lay.positions[n];
            nodes[g.nodes[n].id] = rect_json(Rect{*lay.positions[n], g.nodes[n].width, g.nodes[n].height});
        }
        if (lay.cluster_rects[n]) clusters[g.nodes[n].id] = rect_json(*lay.cluster_rects[n]);
    }
    for (PortIndex p = 0; p < g.ports.size(); ++p) {
        Json o = Json::object();
        if (lay.dummies[p]) {
            o["dummy"] = point_json(*lay.dummies[p]);
            if (g.is_atomic(g.port_parent(p))) g.ports[p].dummy_position = lay.dummies[p];
        }
        if (lay.pins[p]) o["pin"] = point_json(*lay.pins[p]);
        if (!o.empty()) ports[g.ports[p].id] = o;
    }
    for (EdgeIndex e = 0; e < g.edges.size(); ++e) {
        if (!lay.routes[e]) continue;
        Json pts = Json::array();
        for (const Point& p : *lay.routes[e]) pts.push_back(point_json(p));
        routes[g.edges[e].id] = pts;
    }
    const StressConfig& s = cfg.stress;
    Json config{{"ideal_length", s.ideal_length},
                {"flow_gap", s.flow_gap},
                {"spacing", s.spacing},
                {"convergence_tol", s.convergence_tol},
                {"max_iterations", s.max_iterations},
                {"degree_scale", s.degree_scale},
                {"cluster_padding", s.cluster_padding},
                {"dummy_size", cfg.dummy_size},
                {"clearance", cfg.clearance_value()},
                {"bend_penalty", cfg.bend_penalty_value()}};
    Json rejected = Json::array();
    for (auto [k, why] : res.rejected)
        rejected.push_back({{"edge", g.edges[aux.flat_edges[k].chain.front()].id}, {"reason", to_string(why)}});
    Json meta{{"config", config},
              {"seed", s.seed},
              {"stages", to_string(stages)},
              {"warnings", res.warnings},
              {"aligned_edges", res.aligned},
              {"rejected_alignments", rejected},
              {"units", "abstract length units, y grows downwards"}};
    return {{"metadata", meta},
            {"graph", graph_to_json(g)},
            {"layout", {{"nodes", nodes}, {"clusters", clusters}, {"ports", ports}, {"routes", routes}}}};
}

FlatLayout flat_from_document(const AuxGraph& aux, const Json& doc, const StressConfig& cfg)
{
    FlatLayout flat = input_layout(aux, cfg);
    const auto& g = aux.graph;
    if (!doc.contains("layout")) return flat;
    const Json& lay = doc["layout"];
    if (lay.contains("clusters")) {
        for (NodeIndex n = 0; n < g.nodes.size(); ++n) {
            if (g.is_atomic(n) || !lay["clusters"].contains(g.nodes[n].id)) continue;
            const Json& r = lay["clusters"][g.nodes[n].id];
            std::string path = "cluster '" + g.nodes[n].id + "'";
            flat.cluster_rects[n] = Rect{{Reader::num(r, "x", path), Reader::num(r, "y", path)},
                                         Reader::num(r, "width", path), Reader::num(r, "height", path)};
        }
    }
    if (!lay.contains("routes")) return flat;
    const Json& routes = lay["routes"];
    flat.routes.assign(aux.flat_edges.size(), std::nullopt);
    for (std::size_t k = 0; k < aux.flat_edges.size(); ++k) {
        Polyline joined;
        bool complete = true;
        for (EdgeIndex e : aux.flat_edges[k].chain) {
            const std::string& id = g.edges[e].id;
            if (!routes.contains(id) || !routes[id].is_array()) {
                complete = false;
                break;
            }
            for (const auto& p : routes[id]) {
                Point pt = Reader::point(p, "route of edge '" + id + "'");
                if (joined.empty() || !(joined.back() == pt)) joined.push_back(pt);
            }
        }
        if (complete && !joined.empty()) flat.routes[k] = std::move(joined);
    }
    return flat;
}

Json metrics_to_json(const MetricsReport& m)
{
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"nodes", m.nodes},
            {"edges", m.edges},
            {"lbar", opt(m.lbar)},
            {"pstress_at_lbar", opt(m.pstress_at_lbar)},
            {"edge_length_source", m.edge_length_source},
            {"edge_length_mean", opt(m.edge_length_mean)},
            {"edge_length_variance", opt(m.edge_length_variance)},
            {"width", m.width},
            {"height", m.height},
            {"area", m.area},
            {"aspect_ratio", m.aspect_ratio},
            {"crossings", m.crossings},
            {"bends_per_edge", opt(m.bends_per_edge)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace portflow
