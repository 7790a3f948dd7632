#include "medfg/graph.hpp"

#include <utility>

namespace medfg {
namespace {

constexpr std::string_view kNodeKindNames[] = {"Event", "Entity", "Log",
                                               "EventClass"};
constexpr std::string_view kEdgeKindNames[] = {"HAS", "CORR",     "REL",
                                               "DF",  "OBSERVES", "DF_C"};

void require_property(const PropertyMap& properties, NodeKind kind,
                      std::string_view key, std::string_view type_name,
                      bool (*type_check)(const PropertyValue&)) {
  const PropertyValue* value = properties.find(key);
  if (value == nullptr) {
    throw Error(ErrorCode::MissingRequiredProperty,
                std::string(node_kind_name(kind)) +
                    " node requires property '" + std::string(key) + "'");
  }
  if (!type_check(*value)) {
    throw Error(ErrorCode::TypeMismatch,
                "property '" + std::string(key) + "' of a " +
                    std::string(node_kind_name(kind)) + " node must be " +
                    std::string(type_name) + ", got " +
                    std::string(property_type_name(*value)));
  }
}

bool is_string(const PropertyValue& v) {
  return std::holds_alternative<std::string>(v);
}
bool is_timestamp(const PropertyValue& v) {
  return std::holds_alternative<Timestamp>(v);
}

}  // namespace

std::string_view node_kind_name(NodeKind kind) {
  return kNodeKindNames[static_cast<std::size_t>(kind)];
}

std::string_view edge_kind_name(EdgeKind kind) {
  return kEdgeKindNames[static_cast<std::size_t>(kind)];
}

bool parse_node_kind(std::string_view name, NodeKind& out) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (kNodeKindNames[i] == name) {
      out = static_cast<NodeKind>(i);
      return true;
    }
  }
  return false;
}

bool parse_edge_kind(std::string_view name, EdgeKind& out) {
  for (std::size_t i = 0; i < kNumEdgeKinds; ++i) {
    if (kEdgeKindNames[i] == name) {
      out = static_cast<EdgeKind>(i);
      return true;
    }
  }
  return false;
}

std::pair<NodeKind, NodeKind> endpoint_kinds(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::HAS: return {NodeKind::Log, NodeKind::Event};
    case EdgeKind::CORR: return {NodeKind::Event, NodeKind::Entity};
    case EdgeKind::REL: return {NodeKind::Entity, NodeKind::Entity};
    case EdgeKind::DF: return {NodeKind::Event, NodeKind::Event};
    case EdgeKind::OBSERVES: return {NodeKind::EventClass, NodeKind::Event};
    case EdgeKind::DF_C: return {NodeKind::EventClass, NodeKind::EventClass};
  }
  return {NodeKind::Log, NodeKind::Log};  // unreachable
}

NodeId EventGraph::add_node(NodeKind kind, PropertyMap properties) {
  switch (kind) {
    case NodeKind::Event:
      require_property(properties, kind, "activity", "string", is_string);
      require_property(properties, kind, "timestamp", "timestamp",
                       is_timestamp);
      break;
    case NodeKind::Entity:
      require_property(properties, kind, "entity_type", "string", is_string);
      require_property(properties, kind, "entity_id", "string", is_string);
      break;
    case NodeKind::EventClass: {
      require_property(properties, kind, "activity", "string", is_string);
      const std::string& activity = *properties.get_string("activity");
      if (event_class_by_activity_.contains(activity)) {
        throw Error(ErrorCode::DuplicateEventClass,
                    "EventClass with activity '" + activity +
                        "' already exists");
      }
      break;
    }
    case NodeKind::Log:
      break;
  }

  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  if (kind == NodeKind::EventClass) {
    event_class_by_activity_.emplace(*properties.get_string("activity"), id);
  }
  nodes_.push_back(Node{id, kind, std::move(properties)});
  adjacency_.emplace_back();
  return id;
}

EdgeId EventGraph::add_edge(EdgeKind kind, NodeId src, NodeId dst,
                            PropertyMap properties) {
  require_node(src);
  require_node(dst);
  const auto [src_kind, dst_kind] = endpoint_kinds(kind);
  if (nodes_[src.value].kind != src_kind ||
      nodes_[dst.value].kind != dst_kind) {
    throw Error(
        ErrorCode::EndpointKindViolation,
        std::string(edge_kind_name(kind)) + " edges must connect " +
            std::string(node_kind_name(src_kind)) + " to " +
            std::string(node_kind_name(dst_kind)) + ", got " +
            std::string(node_kind_name(nodes_[src.value].kind)) + " to " +
            std::string(node_kind_name(nodes_[dst.value].kind)));
  }

  const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
  edges_.push_back(Edge{id, kind, src, dst, std::move(properties)});
  const auto k = static_cast<std::size_t>(kind);
  adjacency_[src.value].out[k].push_back(id);
  adjacency_[dst.value].in[k].push_back(id);
  return id;
}

const Node& EventGraph::node(NodeId id) const {
  require_node(id);
  return nodes_[id.value];
}

const Edge& EventGraph::edge(EdgeId id) const {
  if (id.value >= edges_.size()) {
    throw Error(ErrorCode::UnknownNode,
                "no edge with id " + std::to_string(id.value));
  }
  return edges_[id.value];
}

std::vector<NodeId> EventGraph::nodes_by_kind(NodeKind kind) const {
  std::vector<NodeId> result;
  for (const Node& n : nodes_) {
    if (n.kind == kind) result.push_back(n.id);
  }
  return result;
}

std::vector<NodeId> EventGraph::neighbors(NodeId node, EdgeKind kind,
                                          Direction direction) const {
  std::vector<NodeId> result;
  for (EdgeId eid : incident_edges(node, kind, direction)) {
    const Edge& e = edges_[eid.value];
    result.push_back(direction == Direction::Out ? e.dst : e.src);
  }
  return result;
}

std::span<const EdgeId> EventGraph::incident_edges(NodeId node, EdgeKind kind,
                                                   Direction direction) const {
  require_node(node);
  const auto k = static_cast<std::size_t>(kind);
  const Adjacency& adj = adjacency_[node.value];
  return direction == Direction::Out ? adj.out[k] : adj.in[k];
}

void EventGraph::require_node(NodeId id) const {
  if (id.value >= nodes_.size()) {
    throw Error(ErrorCode::UnknownNode,
                "no node with id " + std::to_string(id.value));
  }
}

bool structurally_equal(const EventGraph& a, const EventGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
    return false;
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    const Node& na = a.nodes()[i];
    const Node& nb = b.nodes()[i];
    if (na.id != nb.id || na.kind != nb.kind ||
        !(na.properties == nb.properties))
      return false;
  }
  for (std::size_t i = 0; i < a.edge_count(); ++i) {
    const Edge& ea = a.edges()[i];
    const Edge& eb = b.edges()[i];
    if (ea.id != eb.id || ea.kind != eb.kind || ea.src != eb.src ||
        ea.dst != eb.dst || !(ea.properties == eb.properties))
      return false;
  }
  return true;
}

}  // namespace medfg
