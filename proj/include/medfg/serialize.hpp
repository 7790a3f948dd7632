#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medfg/dfg.hpp"
#include "medfg/graph.hpp"
#include "medfg/log.hpp"

namespace medfg {

/// Entity-type/classification to Graphviz color, insertion ordered.
struct Palette {
  std::vector<std::pair<std::string, std::string>> colors;

  const std::string* find(std::string_view entity_type) const;
  void set(std::string entity_type, std::string color);

  /// Admission=red per the visualization convention; the rest chosen for
  /// contrast. Includes the default composite pair.
  static Palette defaults();
};

/// Deterministic DOT rendering of a view: statements sorted by label then
/// id, node identifiers are stable hashes of (kind, label, id). Edge colors
/// come from the palette keyed by entity type (every edge type must be
/// covered); node fill colors come from the palette keyed by the node's
/// classification when available. Class-level edges are labeled with
/// counts, instance-level edges with the entity id.
std::string to_dot(const DfgView& view, const Palette& palette);

/// Lossless JSON dump of a graph. Timestamps are encoded as
/// {"$timestamp": "YYYY-MM-DDTHH:MM:SS"}; other scalars map to native JSON
/// types. Output is deterministic.
std::string graph_to_json(const EventGraph& graph);

/// Inverse of graph_to_json; throws MalformedDump on anything unexpected.
EventGraph graph_from_json(std::string_view text);

/// Inverse of parse_log for schema-conformant records: header is
/// activity, timestamp, entity columns, property columns. Absent
/// entities/properties become empty cells.
std::string log_to_tabular(std::span<const EventRecord> records,
                           const LogSchema& schema);

}  // namespace medfg
