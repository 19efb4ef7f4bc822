#include <CLI11.hpp>

#include <iostream>

#include "portflow/bench.hpp"
#include "portflow/generator.hpp"
#include "portflow/io.hpp"
#include "portflow/svg.hpp"

using namespace portflow;

namespace {

struct Options {
    std::string in;
    std::string stages = "all";
    std::string layout_out, svg_out, metrics_out;
    std::optional<double> clearance, bend_penalty;
    bool boundary_lengths = false;
    PipelineConfig cfg;
};

void add_layout_flags(CLI::App* app, Options& o)
{
    StressConfig& s = o.cfg.stress;
    app->add_option("--in", o.in, "input graph or layout JSON")->required();
    app->add_option("--stages", o.stages, "comma separated subset of position,align,route, or all")
        ->capture_default_str();
    app->add_option("--ideal-length", s.ideal_length, "ideal edge length")->capture_default_str();
    app->add_option("--flow-gap", s.flow_gap, "minimum horizontal gap along directed edges")->capture_default_str();
    app->add_option("--spacing", s.spacing, "minimum gap between node rectangles")->capture_default_str();
    app->add_option("--clearance", o.clearance, "route distance from nodes (default spacing/2)");
    app->add_option("--bend-penalty", o.bend_penalty, "route cost per bend (default ideal-length/2)");
    app->add_option("--seed", s.seed, "seed of the initial placement")->capture_default_str();
    app->add_option("--max-iterations", s.max_iterations, "iterations per majorization run")->capture_default_str();
    app->add_option("--tolerance", s.convergence_tol, "relative stress change that ends a run")->capture_default_str();
    app->add_option("--cluster-padding", s.cluster_padding, "gap between a cluster and its contents")
        ->capture_default_str();
    app->add_option("--dummy-size", o.cfg.dummy_size, "side of port dummy squares")->capture_default_str();
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

void report_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run_layout(Options& o)
{
    o.cfg.clearance = o.clearance;
    o.cfg.bend_penalty = o.bend_penalty;
    Stages stages = parse_stages(o.stages);
    auto parsed = read_graph_file(o.in);
    report_warnings(parsed.warnings);
    auto res = run_pipeline(parsed.graph, o.cfg, stages);
    res.warnings.insert(res.warnings.begin(), parsed.warnings.begin(), parsed.warnings.end());
    report_warnings({res.warnings.begin() + static_cast<long>(parsed.warnings.size()), res.warnings.end()});
    std::string doc = dump(layout_to_json(res, o.cfg, stages));
    if (!o.layout_out.empty() || (o.svg_out.empty() && o.metrics_out.empty())) emit(o.layout_out, doc);
    if (!o.svg_out.empty()) write_file(o.svg_out, emit_svg(res.aux.graph, res.layout));
    if (!o.metrics_out.empty())
        write_file(o.metrics_out, dump(metrics_to_json(summarize(res.flat, res.aux, !o.boundary_lengths))));
    return 0;
}

int run_metrics(Options& o)
{
    o.cfg.clearance = o.clearance;
    o.cfg.bend_penalty = o.bend_penalty;
    std::string text = read_file(o.in);
    auto parsed = parse_graph(text);
    report_warnings(parsed.warnings);
    MetricsReport m;
    if (parsed.has_layout) {
        // measure the stored layout as it is
        auto aux = flatten_compound(expand_ports(parsed.graph, o.cfg.dummy_size));
        auto flat = flat_from_document(aux, Json::parse(text), o.cfg.stress);
        m = summarize(flat, aux, !o.boundary_lengths);
    } else {
        auto res = run_pipeline(parsed.graph, o.cfg, parse_stages(o.stages));
        report_warnings(res.warnings);
        m = summarize(res.flat, res.aux, !o.boundary_lengths);
    }
    emit(o.metrics_out, dump(metrics_to_json(m)));
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Port-constrained stress layout of data flow diagrams"};
    app.require_subcommand(1);

    Options lo;
    auto* layout = app.add_subcommand("layout", "lay out a graph and write layout JSON, SVG and metrics");
    add_layout_flags(layout, lo);
    layout->add_option("--layout-out", lo.layout_out, "layout JSON path (stdout when no output is given)");
    layout->add_option("--svg-out", lo.svg_out, "SVG path");
    layout->add_option("--metrics-out", lo.metrics_out, "metrics JSON path");
    layout->add_flag("--boundary-lengths", lo.boundary_lengths, "edge length statistics from node boundary distances");

    Options mo;
    auto* metrics = app.add_subcommand("metrics", "quality measures of a layout document, or of a fresh layout of a graph");
    add_layout_flags(metrics, mo);
    metrics->add_option("--metrics-out", mo.metrics_out, "metrics JSON path (default stdout)");
    metrics->add_flag("--boundary-lengths", mo.boundary_lengths, "edge length statistics from node boundary distances");

    std::size_t gen_n = 20;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "write a seeded random graph (mean out-degree 1.5)");
    gen->add_option("-n,--nodes", gen_n, "node count")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output path (default stdout)");

    std::vector<std::size_t> sizes{20, 40, 60};
    std::size_t repeats = 10;
    std::uint64_t bench_seed = 1;
    std::string bench_format = "csv", bench_out;
    bool bench_means_only = false;
    PipelineConfig bench_cfg;
    auto* bench = app.add_subcommand("bench", "time the three stages on random graphs");
    bench->add_option("--sizes", sizes, "node counts")->delimiter(',')->capture_default_str();
    bench->add_option("--repeats", repeats, "graphs per size")->capture_default_str();
    bench->add_option("--seed", bench_seed, "seed of the first graph of each size")->capture_default_str();
    bench->add_option("--format", bench_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    bench->add_flag("--means", bench_means_only, "one averaged row per size");
    bench->add_option("--out", bench_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*layout) return run_layout(lo);
        if (*metrics) return run_metrics(mo);
        if (*gen) {
            emit(gen_out, dump(graph_to_json(gen_random(gen_n, gen_seed))));
            return 0;
        }
        if (*bench) {
            auto rows = run_bench(sizes, repeats, bench_seed, bench_cfg);
            if (bench_means_only) rows = bench_means(rows);
            emit(bench_out, bench_format == "csv" ? bench_csv(rows) : dump(bench_json(rows)));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
