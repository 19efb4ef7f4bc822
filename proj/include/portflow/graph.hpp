#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "portflow/geometry.hpp"

namespace portflow {

class LayoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GraphError : public LayoutError {
public:
    using LayoutError::LayoutError;
};

enum class NodeKind { Atomic, Compound };

enum class PortConstraint { Free, FixedSide, FixedOrder, FixedPosition };

enum class Side { Left, Right, Top, Bottom };

const char* to_string(PortConstraint c);
const char* to_string(Side s);
const char* to_string(NodeKind k);
PortConstraint parse_port_constraint(const std::string& tag);
Side parse_side(const std::string& tag);
NodeKind parse_node_kind(const std::string& tag);

/// Outward unit normal of a side in y-down coordinates.
Point side_normal(Side s);

using NodeIndex = std::size_t;
using PortIndex = std::size_t;
using EdgeIndex = std::size_t;

struct Node {
    std::string id;
    double width = 0.0;
    double height = 0.0;
    std::optional<std::string> parent;
    NodeKind kind = NodeKind::Atomic;
    std::string label;
    std::optional<Point> position;  // optional input centre
};

struct Port {
    std::string id;
    std::string parent;
    PortConstraint constraint = PortConstraint::Free;
    std::optional<Side> side;
    std::optional<Point> fixed_offset;
    std::optional<int> declared_order;
    std::optional<Point> dummy_position;  // optional input dummy centre
};

/// An edge connects two ports. Edges declared node-to-node carry the node ids
/// instead; materialize_ports() turns those into Free ports.
struct Edge {
    std::string id;
    std::string source_port;
    std::string target_port;
    std::string source_node;
    std::string target_node;
};

class DiagramGraph {
public:
    std::vector<Node> nodes;
    std::vector<Port> ports;
    std::vector<Edge> edges;
    std::vector<std::vector<std::string>> hyperedges;  // member edge ids

    /// Rebuilds id lookups and checks every structural invariant. Throws GraphError.
    void validate();

    /// Creates Free ports for node-to-node edges. Returns the ids of created ports.
    std::vector<std::string> materialize_ports();

    NodeIndex node_index(const std::string& id) const;
    PortIndex port_index(const std::string& id) const;
    EdgeIndex edge_index(const std::string& id) const;
    bool has_node(const std::string& id) const { return node_lookup_.count(id) != 0; }
    bool has_port(const std::string& id) const { return port_lookup_.count(id) != 0; }

    NodeIndex port_parent(PortIndex p) const { return port_parent_[p]; }
    std::optional<NodeIndex> node_parent(NodeIndex n) const { return node_parent_[n]; }
    PortIndex edge_source(EdgeIndex e) const { return edge_source_[e]; }
    PortIndex edge_target(EdgeIndex e) const { return edge_target_[e]; }
    bool is_compound(NodeIndex n) const { return nodes[n].kind == NodeKind::Compound; }
    bool is_atomic(NodeIndex n) const { return nodes[n].kind == NodeKind::Atomic; }
    bool has_compound_nodes() const;

    const std::vector<PortIndex>& ports_of(NodeIndex n) const { return node_ports_[n]; }
    const std::vector<NodeIndex>& children_of(NodeIndex n) const { return children_[n]; }
    const std::vector<NodeIndex>& roots() const { return roots_; }
    bool is_ancestor(NodeIndex ancestor, NodeIndex n) const;

private:
    void rebuild_lookups();

    std::map<std::string, NodeIndex> node_lookup_;
    std::map<std::string, PortIndex> port_lookup_;
    std::map<std::string, EdgeIndex> edge_lookup_;
    std::vector<NodeIndex> port_parent_;
    std::vector<std::optional<NodeIndex>> node_parent_;
    std::vector<PortIndex> edge_source_;
    std::vector<PortIndex> edge_target_;
    std::vector<std::vector<PortIndex>> node_ports_;
    std::vector<std::vector<NodeIndex>> children_;
    std::vector<NodeIndex> roots_;
};

/// Which side of `r` a point outside it lies on (the axis with the larger excess wins,
/// ties go to left/right). Returns nullopt when the point is strictly inside.
std::optional<Side> side_of_point(const Rect& r, const Point& p);

}  // namespace portflow
