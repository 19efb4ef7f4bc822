#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "portflow/graph.hpp"
#include "portflow/layout.hpp"

namespace portflow {

inline constexpr double kDefaultDummySize = 6.0;

enum class AuxEdgeKind { Inter, ParentLink };

/// Edge of the port-expanded graph. `origin` is the original edge index for Inter
/// edges and the port index for ParentLink edges.
struct AuxEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    AuxEdgeKind kind = AuxEdgeKind::Inter;
    std::size_t origin = 0;
};

/// Edge of the flattened graph between two atomic-owned port dummies. `chain` lists the
/// original edges it stands for, in path order; a single entry means a plain edge.
struct FlatEdge {
    std::size_t source_dummy = 0;
    std::size_t target_dummy = 0;
    std::vector<EdgeIndex> chain;

    bool hierarchical() const { return chain.size() > 1; }
};

struct FlattenWarning {
    std::string message;
    std::vector<EdgeIndex> edges;
};

/// The port-expanded graph and, once flatten_compound() ran, its flat view.
///
/// Auxiliary node indices: [0, |V|) are the proper nodes in graph order, followed by
/// one dummy per port, so dummy_of(p) == |V| + p.
struct AuxGraph {
    DiagramGraph graph;
    double dummy_size = kDefaultDummySize;
    std::vector<std::string> created_ports;
    std::vector<AuxEdge> edges;

    bool flattened = false;
    std::vector<std::size_t> flat_nodes;
    std::vector<FlatEdge> flat_edges;
    std::vector<FlattenWarning> warnings;

    std::size_t proper_count() const { return graph.nodes.size(); }
    std::size_t node_count() const { return graph.nodes.size() + graph.ports.size(); }
    std::size_t dummy_of(PortIndex p) const { return graph.nodes.size() + p; }
    bool is_dummy(std::size_t a) const { return a >= graph.nodes.size(); }
    PortIndex port_of(std::size_t dummy) const { return dummy - graph.nodes.size(); }
    /// Owning proper node of an auxiliary node (itself for proper nodes).
    NodeIndex owner(std::size_t a) const
    {
        return is_dummy(a) ? graph.port_parent(port_of(a)) : a;
    }
    double width(std::size_t a) const { return is_dummy(a) ? dummy_size : graph.nodes[a].width; }
    double height(std::size_t a) const { return is_dummy(a) ? dummy_size : graph.nodes[a].height; }
    Rect rect(std::size_t a, const Point& centre) const { return {centre, width(a), height(a)}; }
};

/// Builds G' from g: one square dummy per port plus the dummy-to-parent links.
/// Node-to-node edges get Free ports first.
AuxGraph expand_ports(DiagramGraph g, double dummy_size = kDefaultDummySize);

/// Drops compound nodes and their ports, replacing hierarchy-crossing edge chains by
/// single flat edges.
AuxGraph flatten_compound(AuxGraph aux);

/// Maps a flat layout back onto the original graph: compound nodes take their cluster
/// rectangles, hierarchical routes are split at cluster boundary crossings, and each
/// crossing becomes the pin of the corresponding hierarchical port.
Layout back_map(const AuxGraph& aux, const FlatLayout& flat);

/// Default attachment point for a port of a node occupying `r` when nothing better is known.
Point default_pin(const Port& port, const Node& node, const Rect& r);

}  // namespace portflow
