#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "portflow/metrics.hpp"
#include "portflow/pipeline.hpp"

namespace portflow {

using Json = nlohmann::json;

struct ParsedGraph {
    DiagramGraph graph;
    std::vector<std::string> warnings;  // unknown fields
    bool has_layout = false;            // the document is a layout written by this tool
};

/// Reads a graph document, or the "graph" member of a layout document. Errors are
/// GraphError with the line (for syntax) or the field path (for content).
ParsedGraph parse_graph(const std::string& text);
ParsedGraph read_graph_file(const std::string& path);

Json graph_to_json(const DiagramGraph& g);

/// Layout document: metadata (config, seed, stages, warnings), the graph with the
/// computed positions folded in so it can be fed back as input, and the geometry.
Json layout_to_json(const PipelineResult& res, const PipelineConfig& cfg, const Stages& stages);

/// Flat layout of a graph read from a layout document: positions come from the graph,
/// routes of chained edges are joined end to end.
FlatLayout flat_from_document(const AuxGraph& aux, const Json& doc, const StressConfig& cfg);

Json metrics_to_json(const MetricsReport& m);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace portflow
