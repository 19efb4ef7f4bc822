#include "portflow/fas.hpp"

#include <stdexcept>

namespace portflow {

std::vector<std::size_t> eades_order(std::size_t n, std::span<const Arc> arcs)
{
    std::vector<std::vector<std::size_t>> out(n), in(n);
    for (const auto& [u, v] : arcs) {
        if (u >= n || v >= n) throw std::out_of_range("arc references unknown vertex");
        if (u == v) continue;
        out[u].push_back(v);
        in[v].push_back(u);
    }
    std::vector<long> indeg(n), outdeg(n);
    for (std::size_t v = 0; v < n; ++v) {
        indeg[v] = static_cast<long>(in[v].size());
        outdeg[v] = static_cast<long>(out[v].size());
    }
    std::vector<bool> gone(n, false);
    std::vector<std::size_t> front, back;
    std::size_t left = n;
    auto remove = [&](std::size_t v) {
        gone[v] = true;
        --left;
        for (std::size_t w : out[v])
            if (!gone[w]) --indeg[w];
        for (std::size_t w : in[v])
            if (!gone[w]) --outdeg[w];
    };
    while (left > 0) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t v = 0; v < n; ++v) {
                if (!gone[v] && outdeg[v] == 0) {
                    back.push_back(v);
                    remove(v);
                    changed = true;
                }
            }
            for (std::size_t v = 0; v < n; ++v) {
                if (!gone[v] && indeg[v] == 0) {
                    front.push_back(v);
                    remove(v);
                    changed = true;
                }
            }
        }
        if (left == 0) break;
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (gone[v]) continue;
            if (best == n || outdeg[v] - indeg[v] > outdeg[best] - indeg[best]) best = v;
        }
        front.push_back(best);
        remove(best);
    }
    front.insert(front.end(), back.rbegin(), back.rend());
    return front;
}

std::vector<std::size_t> greedy_fas(std::size_t n, std::span<const Arc> arcs)
{
    auto order = eades_order(n, arcs);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    std::vector<std::size_t> fas;
    for (std::size_t k = 0; k < arcs.size(); ++k)
        if (rank[arcs[k].first] >= rank[arcs[k].second]) fas.push_back(k);
    return fas;
}

}  // namespace portflow
