#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "portflow/io.hpp"

namespace portflow {

struct BenchRow {
    std::size_t n = 0;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;  // graph seed; the layout seed is the configured one
    std::size_t edges = 0;
    StageTimes times;
};

/// Generates `repeats` random graphs per size (graph seed = seed + repeat) and times
/// the full pipeline on each, sequentially.
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& sizes, std::size_t repeats, std::uint64_t seed,
                                const PipelineConfig& cfg);

/// Per-size means, in the order the sizes first appear.
std::vector<BenchRow> bench_means(const std::vector<BenchRow>& rows);

std::string bench_csv(const std::vector<BenchRow>& rows);
Json bench_json(const std::vector<BenchRow>& rows);

}  // namespace portflow
