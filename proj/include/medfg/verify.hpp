#pragma once

#include <string>
#include <vector>

#include "medfg/graph.hpp"

namespace medfg {

/// Structural checks over a built event graph, each performed by a full
/// re-scan of the node/edge lists (independent of the builder and of the
/// adjacency index):
///   - edge endpoint kinds match the permitted table
///   - adjacency lists agree with the flat edge list
///   - exactly one Log node; every Event has exactly one incoming HAS
///   - every Event has at least one outgoing CORR
///   - per entity, DF edges form a simple path over exactly its events,
///     so the DF edge count is max(0, n-1)
///   - DF endpoints are both correlated to the edge's entity
///   - summed DF_C counts per entity type (activity classes) equal the DF
///     edge count of that type
/// Returns one message per violation; empty means the graph is sound.
std::vector<std::string> check_invariants(const EventGraph& graph);

}  // namespace medfg
