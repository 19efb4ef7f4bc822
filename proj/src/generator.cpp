#include "portflow/generator.hpp"

#include <random>
#include <string>

namespace portflow {

DiagramGraph gen_random(std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw GraphError("random graph needs at least one node");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(30.0, 60.0), height(20.0, 40.0);
    std::bernoulli_distribution second(0.5);
    DiagramGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "n" + std::to_string(i);
        double w = width(rng), h = height(rng);
        g.nodes.push_back({id, w, h, std::nullopt, NodeKind::Atomic, id, std::nullopt});
    }
    if (n == 1) return g;
    std::uniform_int_distribution<std::size_t> other(0, n - 2);
    std::size_t e = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int out = 1 + (second(rng) ? 1 : 0);
        for (int k = 0; k < out; ++k) {
            std::size_t j = other(rng);
            if (j >= i) ++j;
            std::string id = "e" + std::to_string(e++);
            Port src{id + ".out", g.nodes[i].id, PortConstraint::Free, {}, {}, {}, {}};
            Port dst{id + ".in", g.nodes[j].id, PortConstraint::Free, {}, {}, {}, {}};
            g.ports.push_back(src);
            g.ports.push_back(dst);
            g.edges.push_back({id, src.id, dst.id, "", ""});
        }
    }
    return g;
}

}  // namespace portflow
