#include "medfg/dfg.hpp"

#include <algorithm>

#include "medfg/builder.hpp"
#include "medfg/errors.hpp"

namespace medfg {
namespace {

void require_known_types(const EventGraph& graph,
                         const std::set<std::string>& entity_types) {
  const std::set<std::string> known = all_entity_types(graph);
  for (const std::string& type : entity_types) {
    if (!known.contains(type)) {
      throw Error(ErrorCode::UnknownEntityType,
                  "no entity of type '" + type + "' in the graph");
    }
  }
}

std::string classification_of(const Node& event) {
  const std::string* value = event.properties.get_string("EntityType");
  return value ? *value : std::string();
}

}  // namespace

std::set<std::string> all_entity_types(const EventGraph& graph) {
  std::set<std::string> types;
  for (const Node& node : graph.nodes()) {
    if (node.kind == NodeKind::Entity) {
      types.insert(*node.properties.get_string("entity_type"));
    }
  }
  return types;
}

DfgView project_class_dfg(const EventGraph& graph,
                          const std::set<std::string>& entity_types) {
  require_known_types(graph, entity_types);

  DfgView view;
  view.level = DfgLevel::Class;
  view.entity_types.assign(entity_types.begin(), entity_types.end());

  std::set<NodeId> used;
  for (const Edge& edge : graph.edges()) {
    if (edge.kind != EdgeKind::DF_C) continue;
    if (is_property_class(graph.node(edge.src))) continue;
    const std::string& type = *edge.properties.get_string("entity_type");
    if (!entity_types.contains(type)) continue;
    view.edges.push_back(DfgEdge{
        edge.src.value, edge.dst.value, type, std::string(),
        static_cast<std::uint64_t>(*edge.properties.get_int("count"))});
    used.insert(edge.src);
    used.insert(edge.dst);
  }
  for (const NodeId id : used) {  // std::set iterates ascending
    view.nodes.push_back(DfgNode{
        id.value, *graph.node(id).properties.get_string("activity"),
        std::string()});
  }
  return view;
}

DfgView project_instance_dfg(const EventGraph& graph, const EntityRef& scope,
                             const std::set<std::string>& entity_types) {
  require_known_types(graph, entity_types);

  NodeId case_node{0};
  bool found = false;
  for (const Node& node : graph.nodes()) {
    if (node.kind != NodeKind::Entity) continue;
    if (*node.properties.get_string("entity_type") == scope.entity_type &&
        *node.properties.get_string("entity_id") == scope.entity_id) {
      case_node = node.id;
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorCode::UnknownCase, "no entity '" + scope.entity_type +
                                            ":" + scope.entity_id +
                                            "' in the graph");
  }

  // The case, its REL neighbours (either direction), and composites that
  // contain the case as a constituent.
  std::set<NodeId> related;
  related.insert(case_node);
  for (const NodeId n :
       graph.neighbors(case_node, EdgeKind::REL, Direction::Out))
    related.insert(n);
  for (const NodeId n :
       graph.neighbors(case_node, EdgeKind::REL, Direction::In))
    related.insert(n);
  for (const Node& node : graph.nodes()) {
    if (!is_composite_entity(node)) continue;
    const bool has_case =
        (*node.properties.get_string("part1_type") == scope.entity_type &&
         *node.properties.get_string("part1_id") == scope.entity_id) ||
        (*node.properties.get_string("part2_type") == scope.entity_type &&
         *node.properties.get_string("part2_id") == scope.entity_id);
    if (has_case) related.insert(node.id);
  }

  std::set<std::pair<std::string, std::string>> related_refs;
  std::set<NodeId> event_set;
  for (const NodeId entity : related) {
    const Node& node = graph.node(entity);
    related_refs.insert({*node.properties.get_string("entity_type"),
                         *node.properties.get_string("entity_id")});
    for (const NodeId event :
         graph.neighbors(entity, EdgeKind::CORR, Direction::In)) {
      event_set.insert(event);
    }
  }

  DfgView view;
  view.level = DfgLevel::Instance;
  view.scope = scope;
  view.entity_types.assign(entity_types.begin(), entity_types.end());
  for (const NodeId event : event_set) {
    const Node& node = graph.node(event);
    view.nodes.push_back(DfgNode{event.value,
                                 *node.properties.get_string("activity"),
                                 classification_of(node)});
  }
  for (const Edge& edge : graph.edges()) {
    if (edge.kind != EdgeKind::DF) continue;
    if (!event_set.contains(edge.src) || !event_set.contains(edge.dst))
      continue;
    const std::string& type = *edge.properties.get_string("entity_type");
    const std::string& id = *edge.properties.get_string("entity_id");
    if (!entity_types.contains(type)) continue;
    if (!related_refs.contains({type, id})) continue;
    view.edges.push_back(DfgEdge{edge.src.value, edge.dst.value, type, id, 1});
  }
  return view;
}

DfgView filter_dfg(const DfgView& view, std::uint64_t min_count) {
  if (view.level == DfgLevel::Instance) {
    throw Error(ErrorCode::InstanceLevelNotFilterable,
                "instance-level views cannot be filtered by count");
  }
  if (min_count == 0) {
    throw Error(ErrorCode::BadConfig, "min_count must be at least 1");
  }
  DfgView filtered;
  filtered.level = view.level;
  filtered.scope = view.scope;
  filtered.entity_types = view.entity_types;
  std::set<std::uint32_t> used;
  for (const DfgEdge& edge : view.edges) {
    if (edge.count < min_count) continue;
    filtered.edges.push_back(edge);
    used.insert(edge.src);
    used.insert(edge.dst);
  }
  for (const DfgNode& node : view.nodes) {
    if (used.contains(node.id)) filtered.nodes.push_back(node);
  }
  return filtered;
}

}  // namespace medfg
