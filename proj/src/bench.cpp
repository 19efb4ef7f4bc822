#include "portflow/bench.hpp"

#include <sstream>

#include "portflow/generator.hpp"
#include "portflow/svg.hpp"

namespace portflow {

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& sizes, std::size_t repeats, std::uint64_t seed,
                                const PipelineConfig& cfg)
{
    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        for (std::size_t r = 0; r < repeats; ++r) {
            BenchRow row{n, r, seed + r, 0, {}};
            auto g = gen_random(n, row.seed);
            row.edges = g.edges.size();
            row.times = run_pipeline(g, cfg, Stages{}).times;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<BenchRow> bench_means(const std::vector<BenchRow>& rows)
{
    std::vector<BenchRow> out;
    std::vector<std::size_t> count;
    for (const auto& r : rows) {
        std::size_t k = 0;
        while (k < out.size() && out[k].n != r.n) ++k;
        if (k == out.size()) {
            out.push_back({r.n, 0, 0, 0, {}});
            count.push_back(0);
        }
        ++count[k];
        out[k].edges += r.edges;
        out[k].times.position += r.times.position;
        out[k].times.align += r.times.align;
        out[k].times.route += r.times.route;
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        double c = static_cast<double>(count[k]);
        out[k].repeat = count[k];
        out[k].edges = static_cast<std::size_t>(static_cast<double>(out[k].edges) / c + 0.5);
        out[k].times.position /= c;
        out[k].times.align /= c;
        out[k].times.route /= c;
    }
    return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows)
{
    std::ostringstream out;
    out << "n,repeat,seed,edges,position_s,align_s,route_s,total_s\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.repeat << ',' << r.seed << ',' << r.edges << ',' << format_number(r.times.position)
            << ',' << format_number(r.times.align) << ',' << format_number(r.times.route) << ','
            << format_number(r.times.total()) << '\n';
    return out.str();
}

Json bench_json(const std::vector<BenchRow>& rows)
{
    Json out = Json::array();
    for (const auto& r : rows)
        out.push_back({{"n", r.n},
                       {"repeat", r.repeat},
                       {"seed", r.seed},
                       {"edges", r.edges},
                       {"position_s", r.times.position},
                       {"align_s", r.times.align},
                       {"route_s", r.times.route},
                       {"total_s", r.times.total()}});
    return out;
}

}  // namespace portflow
