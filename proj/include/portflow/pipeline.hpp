#pragma once

#include <optional>
#include <string>
#include <vector>

#include "portflow/aligner.hpp"
#include "portflow/aux_graph.hpp"
#include "portflow/stress.hpp"

namespace portflow {

struct PipelineConfig {
    StressConfig stress;
    double dummy_size = kDefaultDummySize;
    std::optional<double> clearance;     // default spacing / 2
    std::optional<double> bend_penalty;  // default ideal_length / 2

    double clearance_value() const { return clearance.value_or(stress.spacing / 2); }
    double bend_penalty_value() const { return bend_penalty.value_or(stress.ideal_length / 2); }
    void validate() const;
};

struct Stages {
    bool position = true;
    bool align = true;
    bool route = true;
};

/// Comma separated subset of position, align, route (or "all"); order is irrelevant.
Stages parse_stages(const std::string& text);
std::string to_string(const Stages& s);

struct StageTimes {
    double position = 0.0;  // seconds
    double align = 0.0;
    double route = 0.0;
    double total() const { return position + align + route; }
};

struct PipelineResult {
    AuxGraph aux;
    FlatLayout flat;
    Layout layout;
    StageTimes times;
    std::size_t aligned = 0;
    std::vector<std::pair<std::size_t, AlignOutcome>> rejected;
    std::vector<std::string> warnings;
};

/// Flat layout taken from the positions stored on the graph: atomic nodes need a
/// position, dummies default to their declared position or a boundary point, and
/// clusters wrap their contents.
FlatLayout input_layout(const AuxGraph& aux, const StressConfig& cfg);

/// Runs the requested stages. Skipped stages take their inputs from the positions
/// carried by the graph.
PipelineResult run_pipeline(const DiagramGraph& g, const PipelineConfig& cfg, const Stages& stages);

}  // namespace portflow
