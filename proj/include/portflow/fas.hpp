#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace portflow {

using Arc = std::pair<std::size_t, std::size_t>;

/// Vertex sequence from sink/source peeling; arcs pointing backwards in it form the FAS.
std::vector<std::size_t> eades_order(std::size_t n, std::span<const Arc> arcs);

/// Indices of a feedback arc set of the digraph (self-loops are always included).
std::vector<std::size_t> greedy_fas(std::size_t n, std::span<const Arc> arcs);

}  // namespace portflow
