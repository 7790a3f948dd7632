#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medfg/errors.hpp"
#include "medfg/property.hpp"

namespace medfg {

enum class NodeKind : std::uint8_t { Event, Entity, Log, EventClass };
enum class EdgeKind : std::uint8_t { HAS, CORR, REL, DF, OBSERVES, DF_C };
enum class Direction : std::uint8_t { Out, In };

inline constexpr std::size_t kNumEdgeKinds = 6;

std::string_view node_kind_name(NodeKind kind);
std::string_view edge_kind_name(EdgeKind kind);
bool parse_node_kind(std::string_view name, NodeKind& out);
bool parse_edge_kind(std::string_view name, EdgeKind& out);

/// Permitted (src kind, dst kind) for an edge kind:
///   HAS Log->Event, CORR Event->Entity, REL Entity->Entity,
///   DF Event->Event, OBSERVES EventClass->Event, DF_C EventClass->EventClass
std::pair<NodeKind, NodeKind> endpoint_kinds(EdgeKind kind);

/// Dense id assigned in insertion order; never reused.
struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
  std::uint32_t value = 0;
  auto operator<=>(const EdgeId&) const = default;
};

struct Node {
  NodeId id;
  NodeKind kind;
  PropertyMap properties;
};

struct Edge {
  EdgeId id;
  EdgeKind kind;
  NodeId src;
  NodeId dst;
  PropertyMap properties;
};

/// In-memory typed property graph for event graphs. Append-only: the build
/// pipeline never deletes, so no removal operations exist. All iteration
/// orders replay insertion order, which makes identical insertion sequences
/// produce structurally identical graphs.
///
/// Single writer during construction; once built the graph is immutable in
/// practice and all const member functions are safe to call concurrently.
class EventGraph {
 public:
  /// Required properties per kind are enforced here: Event nodes need
  /// activity (string) and timestamp; Entity nodes need entity_type and
  /// entity_id (strings); EventClass nodes need a per-graph-unique
  /// activity (string).
  NodeId add_node(NodeKind kind, PropertyMap properties);

  /// Endpoints must exist and match the endpoint_kinds() table.
  EdgeId add_edge(EdgeKind kind, NodeId src, NodeId dst,
                  PropertyMap properties);

  const Node& node(NodeId id) const;
  const Edge& edge(EdgeId id) const;
  bool has_node(NodeId id) const { return id.value < nodes_.size(); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }

  /// Ascending NodeId order.
  std::vector<NodeId> nodes_by_kind(NodeKind kind) const;

  /// Adjacent node ids over edges of one kind, in edge insertion order.
  /// Direction::Out follows src->dst, Direction::In looks at incoming edges.
  std::vector<NodeId> neighbors(NodeId node, EdgeKind kind,
                                Direction direction) const;

  /// Incident edge ids of one kind, in edge insertion order.
  std::span<const EdgeId> incident_edges(NodeId node, EdgeKind kind,
                                         Direction direction) const;

 private:
  struct Adjacency {
    std::array<std::vector<EdgeId>, kNumEdgeKinds> out;
    std::array<std::vector<EdgeId>, kNumEdgeKinds> in;
  };

  void require_node(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Adjacency> adjacency_;
  std::unordered_map<std::string, NodeId> event_class_by_activity_;
};

/// Node-by-node, edge-by-edge equality of ids, kinds and properties.
/// Adjacency is derived from edges, so it needs no separate comparison.
bool structurally_equal(const EventGraph& a, const EventGraph& b);

}  // namespace medfg
