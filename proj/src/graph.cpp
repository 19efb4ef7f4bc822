#include "portflow/graph.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace portflow {

const char* to_string(PortConstraint c)
{
    switch (c) {
    case PortConstraint::Free: return "free";
    case PortConstraint::FixedSide: return "fixed_side";
    case PortConstraint::FixedOrder: return "fixed_order";
    case PortConstraint::FixedPosition: return "fixed_position";
    }
    return "?";
}

const char* to_string(Side s)
{
    switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Bottom: return "bottom";
    }
    return "?";
}

const char* to_string(NodeKind k) { return k == NodeKind::Atomic ? "atomic" : "compound"; }

PortConstraint parse_port_constraint(const std::string& tag)
{
    if (tag == "free") return PortConstraint::Free;
    if (tag == "fixed_side") return PortConstraint::FixedSide;
    if (tag == "fixed_order") return PortConstraint::FixedOrder;
    if (tag == "fixed_position") return PortConstraint::FixedPosition;
    throw GraphError("unknown port constraint '" + tag + "'");
}

Side parse_side(const std::string& tag)
{
    if (tag == "left") return Side::Left;
    if (tag == "right") return Side::Right;
    if (tag == "top") return Side::Top;
    if (tag == "bottom") return Side::Bottom;
    throw GraphError("unknown port side '" + tag + "'");
}

NodeKind parse_node_kind(const std::string& tag)
{
    if (tag == "atomic") return NodeKind::Atomic;
    if (tag == "compound") return NodeKind::Compound;
    throw GraphError("unknown node kind '" + tag + "'");
}

Point side_normal(Side s)
{
    switch (s) {
    case Side::Left: return {-1, 0};
    case Side::Right: return {1, 0};
    case Side::Top: return {0, -1};
    case Side::Bottom: return {0, 1};
    }
    return {};
}

std::optional<Side> side_of_point(const Rect& r, const Point& p)
{
    Point d = p - r.centre;
    double ex = std::abs(d.x) - r.width / 2;
    double ey = std::abs(d.y) - r.height / 2;
    if (ex < 0 && ey < 0) return std::nullopt;
    if (ex >= ey) return d.x > 0 ? Side::Right : Side::Left;
    return d.y > 0 ? Side::Bottom : Side::Top;
}

NodeIndex DiagramGraph::node_index(const std::string& id) const
{
    auto it = node_lookup_.find(id);
    if (it == node_lookup_.end()) throw GraphError("unknown node '" + id + "'");
    return it->second;
}

PortIndex DiagramGraph::port_index(const std::string& id) const
{
    auto it = port_lookup_.find(id);
    if (it == port_lookup_.end()) throw GraphError("unknown port '" + id + "'");
    return it->second;
}

EdgeIndex DiagramGraph::edge_index(const std::string& id) const
{
    auto it = edge_lookup_.find(id);
    if (it == edge_lookup_.end()) throw GraphError("unknown edge '" + id + "'");
    return it->second;
}

bool DiagramGraph::has_compound_nodes() const
{
    return std::any_of(nodes.begin(), nodes.end(),
                       [](const Node& n) { return n.kind == NodeKind::Compound; });
}

bool DiagramGraph::is_ancestor(NodeIndex ancestor, NodeIndex n) const
{
    auto p = node_parent_[n];
    while (p) {
        if (*p == ancestor) return true;
        p = node_parent_[*p];
    }
    return false;
}

std::vector<std::string> DiagramGraph::materialize_ports()
{
    std::set<std::string> taken;
    for (const auto& p : ports) taken.insert(p.id);
    std::vector<std::string> created;
    auto make = [&](const std::string& node, const std::string& edge, const char* role) {
        std::string id = node + "." + edge + "." + role;
        while (taken.count(id)) id += "_";
        taken.insert(id);
        Port p;
        p.id = id;
        p.parent = node;
        ports.push_back(p);
        created.push_back(id);
        return id;
    };
    for (auto& e : edges) {
        if (e.source_port.empty()) {
            if (e.source_node.empty()) throw GraphError("edge '" + e.id + "' has no source");
            e.source_port = make(e.source_node, e.id, "out");
        }
        if (e.target_port.empty()) {
            if (e.target_node.empty()) throw GraphError("edge '" + e.id + "' has no target");
            e.target_port = make(e.target_node, e.id, "in");
        }
    }
    return created;
}

void DiagramGraph::rebuild_lookups()
{
    node_lookup_.clear();
    port_lookup_.clear();
    edge_lookup_.clear();
    for (NodeIndex i = 0; i < nodes.size(); ++i) {
        if (!node_lookup_.emplace(nodes[i].id, i).second)
            throw GraphError("duplicate node id '" + nodes[i].id + "'");
    }
    for (PortIndex i = 0; i < ports.size(); ++i) {
        if (!port_lookup_.emplace(ports[i].id, i).second)
            throw GraphError("duplicate port id '" + ports[i].id + "'");
    }
    for (EdgeIndex i = 0; i < edges.size(); ++i) {
        if (!edge_lookup_.emplace(edges[i].id, i).second)
            throw GraphError("duplicate edge id '" + edges[i].id + "'");
    }
}

void DiagramGraph::validate()
{
    rebuild_lookups();
    const std::size_t n = nodes.size();

    node_parent_.assign(n, std::nullopt);
    children_.assign(n, {});
    roots_.clear();
    for (NodeIndex i = 0; i < n; ++i) {
        const Node& node = nodes[i];
        if (!(node.width > 0) || !(node.height > 0) || !std::isfinite(node.width) ||
            !std::isfinite(node.height))
            throw GraphError("node '" + node.id + "' must have positive finite width and height");
        if (node.parent) {
            auto it = node_lookup_.find(*node.parent);
            if (it == node_lookup_.end())
                throw GraphError("node '" + node.id + "' has unknown parent '" + *node.parent + "'");
            if (it->second == i) throw GraphError("node '" + node.id + "' is its own parent");
            node_parent_[i] = it->second;
            children_[it->second].push_back(i);
        } else {
            roots_.push_back(i);
        }
    }
    for (NodeIndex i = 0; i < n; ++i) {
        if (!children_[i].empty()) nodes[i].kind = NodeKind::Compound;
    }
    // containment must be a forest
    for (NodeIndex i = 0; i < n; ++i) {
        std::size_t steps = 0;
        auto p = node_parent_[i];
        while (p) {
            if (++steps > n) throw GraphError("containment cycle through node '" + nodes[i].id + "'");
            p = node_parent_[*p];
        }
    }

    port_parent_.assign(ports.size(), 0);
    node_ports_.assign(n, {});
    std::set<std::tuple<NodeIndex, int, int>> ranks;
    for (PortIndex i = 0; i < ports.size(); ++i) {
        const Port& port = ports[i];
        auto it = node_lookup_.find(port.parent);
        if (it == node_lookup_.end())
            throw GraphError("port '" + port.id + "' has unknown parent '" + port.parent + "'");
        port_parent_[i] = it->second;
        node_ports_[it->second].push_back(i);
        const Node& owner = nodes[it->second];
        switch (port.constraint) {
        case PortConstraint::FixedPosition: {
            if (!port.fixed_offset)
                throw GraphError("port '" + port.id + "' is fixed_position but has no offset");
            Rect r{{0, 0}, owner.width, owner.height};
            if (!r.on_boundary(*port.fixed_offset, 1e-6))
                throw GraphError("port '" + port.id + "' offset does not lie on the node boundary");
            break;
        }
        case PortConstraint::FixedOrder:
            if (!port.declared_order)
                throw GraphError("port '" + port.id + "' is fixed_order but has no order");
            [[fallthrough]];
        case PortConstraint::FixedSide:
            if (!port.side) throw GraphError("port '" + port.id + "' needs a side");
            if (port.constraint == PortConstraint::FixedOrder &&
                !ranks.emplace(it->second, static_cast<int>(*port.side), *port.declared_order).second)
                throw GraphError("duplicate order " + std::to_string(*port.declared_order) +
                                 " on side " + to_string(*port.side) + " of node '" + owner.id + "'");
            break;
        case PortConstraint::Free:
            break;
        }
    }

    edge_source_.assign(edges.size(), 0);
    edge_target_.assign(edges.size(), 0);
    for (EdgeIndex i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        auto s = port_lookup_.find(e.source_port);
        auto t = port_lookup_.find(e.target_port);
        if (s == port_lookup_.end())
            throw GraphError("edge '" + e.id + "' references unknown port '" + e.source_port + "'");
        if (t == port_lookup_.end())
            throw GraphError("edge '" + e.id + "' references unknown port '" + e.target_port + "'");
        if (s->second == t->second)
            throw GraphError("edge '" + e.id + "' must connect two distinct ports");
        edge_source_[i] = s->second;
        edge_target_[i] = t->second;
    }

    for (const auto& h : hyperedges) {
        std::vector<EdgeIndex> members;
        for (const auto& id : h) members.push_back(edge_index(id));
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                std::set<PortIndex> pa{edge_source_[members[a]], edge_target_[members[a]]};
                if (!pa.count(edge_source_[members[b]]) && !pa.count(edge_target_[members[b]]))
                    throw GraphError("hyperedge members '" + edges[members[a]].id + "' and '" +
                                     edges[members[b]].id + "' share no port");
            }
        }
    }
}

}  // namespace portflow
