#pragma once

#include <cstddef>
#include <cstdint>

#include "portflow/graph.hpp"

namespace portflow {

/// Seeded random diagram: each node emits one edge plus a second with probability 1/2,
/// to uniformly chosen other nodes, with one Free port per edge endpoint.
DiagramGraph gen_random(std::size_t n, std::uint64_t seed);

}  // namespace portflow
