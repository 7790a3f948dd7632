#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "medfg/graph.hpp"
#include "medfg/log.hpp"

namespace medfg {

enum class DfgLevel : std::uint8_t { Instance, Class };

struct DfgNode {
  std::uint32_t id = 0;     // underlying graph node id
  std::string label;        // activity
  std::string classification;  // event's EntityType property; empty for classes
  bool operator==(const DfgNode&) const = default;
};

struct DfgEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::string entity_type;
  std::string entity_id;    // instance level only
  std::uint64_t count = 1;  // class level: aggregated count
  bool operator==(const DfgEdge&) const = default;
};

/// Projected directly-follows view, detached from the graph it came from.
struct DfgView {
  DfgLevel level = DfgLevel::Class;
  std::vector<DfgNode> nodes;
  std::vector<DfgEdge> edges;
  std::optional<EntityRef> scope;        // instance level: the case
  std::vector<std::string> entity_types;  // selected types, sorted
};

/// Entity types present in the graph, composite types included.
std::set<std::string> all_entity_types(const EventGraph& graph);

/// Class-level view: DF_C edges between activity classes restricted to the
/// selected entity types, plus the classes incident to them. An empty
/// selection yields an empty view.
DfgView project_class_dfg(const EventGraph& graph,
                          const std::set<std::string>& entity_types);

/// Instance-level view for one case: events correlated to the case entity,
/// to any REL-related entity, or to a composite containing it, with the DF
/// edges of selected types among them.
DfgView project_instance_dfg(const EventGraph& graph, const EntityRef& scope,
                             const std::set<std::string>& entity_types);

/// Drops class-level edges with count below min_count and then any isolated
/// nodes. Instance views are not filterable.
DfgView filter_dfg(const DfgView& view, std::uint64_t min_count);

}  // namespace medfg
