#include "medfg/verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "medfg/builder.hpp"

namespace medfg {
namespace {

std::string node_desc(const EventGraph& graph, NodeId id) {
  const Node& node = graph.node(id);
  std::string desc = std::string(node_kind_name(node.kind)) + " #" +
                     std::to_string(id.value);
  if (const std::string* activity = node.properties.get_string("activity")) {
    desc += " ('" + *activity + "')";
  }
  return desc;
}

}  // namespace

std::vector<std::string> check_invariants(const EventGraph& graph) {
  std::vector<std::string> violations;
  auto report = [&violations](std::string message) {
    violations.push_back(std::move(message));
  };

  const std::size_t n = graph.node_count();

  // Edge kind table and endpoint existence.
  for (const Edge& edge : graph.edges()) {
    if (!graph.has_node(edge.src) || !graph.has_node(edge.dst)) {
      report("edge #" + std::to_string(edge.id.value) +
             " references a missing node");
      continue;
    }
    const auto [src_kind, dst_kind] = endpoint_kinds(edge.kind);
    if (graph.node(edge.src).kind != src_kind ||
        graph.node(edge.dst).kind != dst_kind) {
      report("edge #" + std::to_string(edge.id.value) + " (" +
             std::string(edge_kind_name(edge.kind)) +
             ") violates the endpoint kind table");
    }
  }

  // Adjacency lists must mirror the flat edge list exactly. Expected lists
  // are rebuilt in one scan so the check stays linear.
  {
    struct PerNode {
      std::array<std::vector<std::uint32_t>, kNumEdgeKinds> out;
      std::array<std::vector<std::uint32_t>, kNumEdgeKinds> in;
    };
    std::vector<PerNode> expected(n);
    for (const Edge& edge : graph.edges()) {
      const auto k = static_cast<std::size_t>(edge.kind);
      if (edge.src.value < n) expected[edge.src.value].out[k].push_back(edge.id.value);
      if (edge.dst.value < n) expected[edge.dst.value].in[k].push_back(edge.id.value);
    }
    for (const Node& node : graph.nodes()) {
      for (std::size_t k = 0; k < kNumEdgeKinds; ++k) {
        const EdgeKind kind = static_cast<EdgeKind>(k);
        auto actual = [&](Direction dir) {
          std::vector<std::uint32_t> ids;
          for (const EdgeId e : graph.incident_edges(node.id, kind, dir))
            ids.push_back(e.value);
          return ids;
        };
        if (actual(Direction::Out) != expected[node.id.value].out[k] ||
            actual(Direction::In) != expected[node.id.value].in[k]) {
          report("adjacency of " + node_desc(graph, node.id) +
                 " disagrees with the edge list for kind " +
                 std::string(edge_kind_name(kind)));
        }
      }
    }
  }

  // Log/HAS/CORR degrees.
  const auto logs = graph.nodes_by_kind(NodeKind::Log);
  if (logs.size() != 1) {
    report("expected exactly one Log node, found " +
           std::to_string(logs.size()));
  }
  {
    std::vector<std::size_t> has_in(n, 0);
    std::vector<std::size_t> corr_out(n, 0);
    for (const Edge& edge : graph.edges()) {
      if (edge.kind == EdgeKind::HAS && edge.dst.value < n)
        ++has_in[edge.dst.value];
      if (edge.kind == EdgeKind::CORR && edge.src.value < n)
        ++corr_out[edge.src.value];
    }
    for (const NodeId event : graph.nodes_by_kind(NodeKind::Event)) {
      if (has_in[event.value] != 1) {
        report(node_desc(graph, event) + " has " +
               std::to_string(has_in[event.value]) +
               " incoming HAS edges, expected 1");
      }
      if (corr_out[event.value] == 0) {
        report(node_desc(graph, event) + " is not correlated to any entity");
      }
    }
  }

  // Per-entity DF chains: group CORR and DF edges by entity in one scan
  // each, then verify a simple path over exactly the entity's events.
  {
    std::map<std::uint32_t, std::set<NodeId>> events_of;
    for (const Edge& edge : graph.edges()) {
      if (edge.kind == EdgeKind::CORR) {
        events_of[edge.dst.value].insert(edge.src);
      }
    }
    std::map<std::pair<std::string, std::string>, std::vector<const Edge*>>
        chains;
    for (const Edge& edge : graph.edges()) {
      if (edge.kind != EdgeKind::DF) continue;
      const std::string* type = edge.properties.get_string("entity_type");
      const std::string* id = edge.properties.get_string("entity_id");
      if (type == nullptr || id == nullptr) {
        report("DF edge #" + std::to_string(edge.id.value) +
               " is missing entity labels");
        continue;
      }
      chains[{*type, *id}].push_back(&edge);
    }

    for (const NodeId entity : graph.nodes_by_kind(NodeKind::Entity)) {
      const Node& node = graph.node(entity);
      const std::string& type = *node.properties.get_string("entity_type");
      const std::string& id = *node.properties.get_string("entity_id");
      const std::set<NodeId>& events = events_of[entity.value];
      const auto chain_it = chains.find({type, id});
      const std::vector<const Edge*> empty_chain;
      const std::vector<const Edge*>& chain =
          chain_it == chains.end() ? empty_chain : chain_it->second;

      const std::size_t expected = events.empty() ? 0 : events.size() - 1;
      if (chain.size() != expected) {
        report("entity " + type + ":" + id + " has " +
               std::to_string(chain.size()) + " DF edges, expected " +
               std::to_string(expected));
        continue;
      }
      if (chain.empty()) continue;

      std::map<NodeId, std::size_t> out_deg;
      std::map<NodeId, std::size_t> in_deg;
      bool endpoints_ok = true;
      for (const Edge* edge : chain) {
        if (!events.contains(edge->src) || !events.contains(edge->dst)) {
          report("DF edge #" + std::to_string(edge->id.value) +
                 " connects events not correlated to entity " + type + ":" +
                 id);
          endpoints_ok = false;
        }
        ++out_deg[edge->src];
        ++in_deg[edge->dst];
      }
      if (!endpoints_ok) continue;

      NodeId start{0};
      std::size_t starts = 0;
      bool branching = false;
      for (const NodeId event : events) {
        if (out_deg[event] > 1 || in_deg[event] > 1) {
          report("entity " + type + ":" + id +
                 " has a branching DF relation at " + node_desc(graph, event));
          branching = true;
          break;
        }
        if (in_deg[event] == 0) {
          start = event;
          ++starts;
        }
      }
      if (branching) continue;
      if (starts != 1) {
        report("entity " + type + ":" + id + " has " + std::to_string(starts) +
               " DF chain starts, expected 1");
        continue;
      }

      // Walk the chain; it must visit every correlated event exactly once.
      std::map<NodeId, NodeId> next;
      for (const Edge* edge : chain) next.emplace(edge->src, edge->dst);
      std::set<NodeId> visited;
      NodeId current = start;
      visited.insert(current);
      while (true) {
        const auto it = next.find(current);
        if (it == next.end()) break;
        current = it->second;
        if (!visited.insert(current).second) {
          report("entity " + type + ":" + id + " has a cyclic DF relation");
          break;
        }
      }
      if (visited.size() != events.size()) {
        report("entity " + type + ":" + id + " DF chain visits " +
               std::to_string(visited.size()) + " of " +
               std::to_string(events.size()) + " events");
      }
    }
  }

  // DF_C conservation per entity type (activity classes only).
  std::map<std::string, std::int64_t> df_counts;
  for (const Edge& edge : graph.edges()) {
    if (edge.kind == EdgeKind::DF) {
      if (const std::string* type = edge.properties.get_string("entity_type"))
        df_counts[*type] += 1;
    }
  }
  std::map<std::string, std::int64_t> dfc_counts;
  for (const Edge& edge : graph.edges()) {
    if (edge.kind != EdgeKind::DF_C) continue;
    if (is_property_class(graph.node(edge.src))) continue;
    const std::string* type = edge.properties.get_string("entity_type");
    const std::int64_t* count = edge.properties.get_int("count");
    if (type == nullptr || count == nullptr || *count < 1) {
      report("DF_C edge #" + std::to_string(edge.id.value) +
             " is missing entity_type or a positive count");
      continue;
    }
    dfc_counts[*type] += *count;
  }
  if (df_counts != dfc_counts &&
      !graph.nodes_by_kind(NodeKind::EventClass).empty()) {
    for (const auto& [type, count] : df_counts) {
      const auto it = dfc_counts.find(type);
      const std::int64_t aggregated = it == dfc_counts.end() ? 0 : it->second;
      if (aggregated != count) {
        report("entity type '" + type + "': DF_C counts sum to " +
               std::to_string(aggregated) + " but there are " +
               std::to_string(count) + " DF edges");
      }
    }
    for (const auto& [type, count] : dfc_counts) {
      if (!df_counts.contains(type)) {
        report("entity type '" + type + "': DF_C counts sum to " +
               std::to_string(count) + " but there are no DF edges");
      }
    }
  }

  return violations;
}

}  // namespace medfg
