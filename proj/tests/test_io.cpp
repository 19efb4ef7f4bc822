#include <doctest.h>

#include <cmath>
#include <regex>
#include <sstream>

#include "portflow/bench.hpp"
#include "portflow/generator.hpp"
#include "portflow/io.hpp"
#include "portflow/svg.hpp"

using namespace portflow;

namespace {

std::string sample(const char* name) { return std::string(PORTFLOW_SAMPLES) + "/" + name; }

double max_diff(const Layout& a, const Layout& b)
{
    double d = 0;
    auto pts = [&](const std::vector<std::optional<Point>>& x, const std::vector<std::optional<Point>>& y) {
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            REQUIRE(x[i].has_value() == y[i].has_value());
            if (x[i]) d = std::max(d, norm(*x[i] - *y[i]));
        }
    };
    pts(a.positions, b.positions);
    pts(a.dummies, b.dummies);
    pts(a.pins, b.pins);
    REQUIRE(a.routes.size() == b.routes.size());
    for (std::size_t e = 0; e < a.routes.size(); ++e) {
        REQUIRE(a.routes[e].has_value() == b.routes[e].has_value());
        if (!a.routes[e]) continue;
        REQUIRE(a.routes[e]->size() == b.routes[e]->size());
        for (std::size_t i = 0; i < a.routes[e]->size(); ++i) d = std::max(d, norm((*a.routes[e])[i] - (*b.routes[e])[i]));
    }
    return d;
}

}  // namespace

TEST_CASE("graph parse diagnostics")
{
    CHECK_THROWS_WITH_AS(parse_graph("{\n  \"nodes\": [\n  {\"id\": \"a\",,}\n]}"), doctest::Contains("line 3"), GraphError);
    CHECK_THROWS_WITH_AS(parse_graph(R"({"nodes": [{"id": "a", "width": "wide", "height": 3}]})"),
                         doctest::Contains("node 'a'.width: expected a number"), GraphError);
    CHECK_THROWS_WITH_AS(parse_graph(R"({"nodes": [{"width": 3, "height": 3}]})"), doctest::Contains("nodes[0].id"),
                         GraphError);
    CHECK_THROWS_WITH_AS(
        parse_graph(R"({"nodes": [{"id": "a", "width": 3, "height": 3}], "ports": [{"id": "p", "parent": "a", "side": "up"}]})"),
        doctest::Contains("port 'p'.side"), GraphError);
    CHECK_THROWS_AS(parse_graph(R"({"nodes": {}})"), GraphError);

    auto warned = parse_graph(R"({"nodes": [{"id": "a", "width": 3, "height": 3, "colour": "red"}], "title": "x"})");
    CHECK(warned.warnings.size() == 2);
    CHECK(warned.warnings[0] == "ignoring unknown field graph.title");
    CHECK(warned.warnings[1] == "ignoring unknown field nodes[0].colour");
    CHECK_FALSE(warned.has_layout);
}

TEST_CASE("graph JSON round trip")
{
    for (const char* name : {"flat.json", "compound.json"}) {
        auto g = read_graph_file(sample(name)).graph;
        Json once = graph_to_json(g);
        auto back = parse_graph(dump(once));
        CHECK(back.warnings.empty());
        CHECK(graph_to_json(back.graph) == once);
    }
    auto r = gen_random(30, 4);
    CHECK(dump(graph_to_json(parse_graph(dump(graph_to_json(r))).graph)) == dump(graph_to_json(r)));
}

TEST_CASE("stage gating")
{
    auto g = read_graph_file(sample("flat.json")).graph;
    PipelineConfig cfg;
    auto pos = run_pipeline(g, cfg, parse_stages("position"));
    for (const auto& r : pos.layout.routes) CHECK_FALSE(r.has_value());
    CHECK(pos.aligned == 0);
    Json doc = layout_to_json(pos, cfg, parse_stages("position"));
    CHECK(doc["layout"]["routes"].empty());
    CHECK(doc["metadata"]["stages"] == "position");

    // routing alone needs positions; the sample has none
    CHECK_THROWS_AS(run_pipeline(g, cfg, parse_stages("route")), LayoutError);
    auto fed = parse_graph(dump(doc));
    CHECK(fed.has_layout);
    auto routed = run_pipeline(fed.graph, cfg, parse_stages("route"));
    for (const auto& r : routed.layout.routes) CHECK(r.has_value());
    for (NodeIndex n = 0; n < g.nodes.size(); ++n) CHECK(*routed.layout.positions[n] == *pos.layout.positions[n]);

    CHECK_THROWS_AS(parse_stages("position,shuffle"), LayoutError);
    CHECK(to_string(parse_stages("all")) == "position,align,route");
    CHECK(to_string(parse_stages("route,position")) == "position,route");
}

TEST_CASE("layout output is deterministic and composable")
{
    for (const char* name : {"flat.json", "compound.json"}) {
        auto g = read_graph_file(sample(name)).graph;
        PipelineConfig cfg;
        auto full = run_pipeline(g, cfg, Stages{});
        auto again = run_pipeline(g, cfg, Stages{});
        CHECK(dump(layout_to_json(full, cfg, Stages{})) == dump(layout_to_json(again, cfg, Stages{})));

        Stages first = parse_stages("position"), rest = parse_stages("align,route");
        auto staged = run_pipeline(g, cfg, first);
        auto fed = parse_graph(dump(layout_to_json(staged, cfg, first)));
        auto second = run_pipeline(fed.graph, cfg, rest);
        CHECK(max_diff(full.layout, second.layout) <= 1e-9);
    }
}

TEST_CASE("stored layouts are measured as written")
{
    auto g = read_graph_file(sample("compound.json")).graph;
    PipelineConfig cfg;
    auto res = run_pipeline(g, cfg, Stages{});
    std::string text = dump(layout_to_json(res, cfg, Stages{}));
    auto parsed = parse_graph(text);
    auto aux = flatten_compound(expand_ports(parsed.graph, cfg.dummy_size));
    auto flat = flat_from_document(aux, Json::parse(text), cfg.stress);
    auto direct = summarize(res.flat, res.aux), stored = summarize(flat, aux);
    CHECK(dump(metrics_to_json(direct)) == dump(metrics_to_json(stored)));
    CHECK(stored.edge_length_source == "route");
}

TEST_CASE("SVG reads back the layout geometry")
{
    auto g = read_graph_file(sample("compound.json")).graph;
    PipelineConfig cfg;
    auto res = run_pipeline(g, cfg, Stages{});
    Json doc = layout_to_json(res, cfg, Stages{});
    std::string svg = emit_svg(res.aux.graph, res.layout);

    std::regex rect(R"re(<rect class="(node|cluster)" data-id="([^"]*)" x="([^"]*)" y="([^"]*)" width="([^"]*)" height="([^"]*)"/>)re");
    std::size_t nodes = 0, clusters = 0;
    for (std::sregex_iterator it(svg.begin(), svg.end(), rect), end; it != end; ++it) {
        const auto& m = *it;
        const Json& r = doc["layout"][m[1] == "node" ? "nodes" : "clusters"][m[2].str()];
        (m[1] == "node" ? nodes : clusters)++;
        double w = r["width"], h = r["height"], x = r["x"], y = r["y"];
        CHECK(m[3].str() == format_number(x - w / 2));
        CHECK(m[4].str() == format_number(y - h / 2));
        CHECK(std::stod(m[3].str()) == x - w / 2);
        CHECK(m[5].str() == format_number(w));
        CHECK(m[6].str() == format_number(h));
    }
    CHECK(nodes == doc["layout"]["nodes"].size());
    CHECK(clusters == doc["layout"]["clusters"].size());

    std::regex line(R"re(<polyline class="route" data-id="([^"]*)" points="([^"]*)")re");
    std::size_t routes = 0;
    for (std::sregex_iterator it(svg.begin(), svg.end(), line), end; it != end; ++it, ++routes) {
        std::istringstream pts((*it)[2].str());
        std::string pair;
        std::size_t i = 0;
        const Json& want = doc["layout"]["routes"][(*it)[1].str()];
        while (pts >> pair) {
            auto comma = pair.find(',');
            REQUIRE(i < want.size());
            CHECK(std::stod(pair.substr(0, comma)) == want[i][0].get<double>());
            CHECK(std::stod(pair.substr(comma + 1)) == want[i][1].get<double>());
            ++i;
        }
        CHECK(i == want.size());
    }
    CHECK(routes == doc["layout"]["routes"].size());
    // clusters paint before nodes
    CHECK(svg.find("class=\"cluster\"") < svg.find("class=\"node\""));
}

TEST_CASE("SVG of tiny graphs")
{
    DiagramGraph empty;
    std::string svg = emit_svg(empty, Layout{});
    CHECK(svg.find("viewBox=\"-20 -20 40 40\"") != std::string::npos);
    CHECK(svg.find("<rect") == std::string::npos);

    DiagramGraph one;
    one.nodes = {{"solo", 30, 20, {}, NodeKind::Atomic, "a & b", Point{0, 0}}};
    auto res = run_pipeline(one, PipelineConfig{}, Stages{});
    svg = emit_svg(res.aux.graph, res.layout);
    std::regex node("<rect class=\"node\"");
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), node), std::sregex_iterator()) == 1);
    CHECK(svg.find("a &amp; b") != std::string::npos);
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("random graph generator")
{
    auto one = gen_random(1, 9);
    CHECK(one.nodes.size() == 1);
    CHECK(one.edges.empty());
    CHECK_THROWS_AS(gen_random(0, 1), GraphError);

    auto big = gen_random(1000, 5);
    double mean = static_cast<double>(big.edges.size()) / 1000;
    CHECK(mean >= 1.4);
    CHECK(mean <= 1.6);
    auto aux = expand_ports(big);
    for (const auto& e : aux.graph.edges) CHECK(aux.graph.port_parent(aux.graph.port_index(e.source_port)) !=
                                                aux.graph.port_parent(aux.graph.port_index(e.target_port)));
    CHECK(graph_to_json(gen_random(40, 3)) == graph_to_json(gen_random(40, 3)));
    CHECK(graph_to_json(gen_random(40, 3)) != graph_to_json(gen_random(40, 4)));
}

TEST_CASE("benchmark rows")
{
    PipelineConfig cfg;
    auto rows = run_bench({10}, 1, 1, cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 10);
    CHECK(rows[0].seed == 1);
    CHECK(rows[0].edges == gen_random(10, 1).edges.size());
    CHECK(rows[0].times.total() > 0);

    auto many = run_bench({8, 24}, 3, 2, cfg);
    CHECK(many.size() == 6);
    auto means = bench_means(many);
    REQUIRE(means.size() == 2);
    CHECK(means[0].repeat == 3);
    CHECK(means[0].times.total() < means[1].times.total());
    std::string csv = bench_csv(means);
    CHECK(csv.rfind("n,repeat,seed,edges,position_s,align_s,route_s,total_s\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(bench_json(many).size() == 6);
}
