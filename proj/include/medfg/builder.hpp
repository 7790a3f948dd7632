#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medfg/config.hpp"
#include "medfg/graph.hpp"
#include "medfg/log.hpp"

namespace medfg {

/// Settings for the six-step event graph construction.
///
/// Events of one entity are ordered by the fixed comparator
/// (timestamp, source_row, node id); the tie_break field documents it and
/// rejects anything else.
struct BuildConfig {
  /// Entity types turned into Entity nodes. Empty means every type found in
  /// the records, in order of first appearance. The order also directs REL
  /// edges: the earlier type is the source.
  std::vector<std::string> entity_types_to_correlate;

  /// Type pairs whose REL edges are reified into composite entities named
  /// "A|B" / "idA|idB". Pairs that never occur in the graph are no-ops.
  std::vector<std::pair<std::string, std::string>> reify_pairs = {
      {"Patient", "Admission"}};

  /// When set, one extra class node per distinct value of this event
  /// property is built (labeled "key=value"), with its own OBSERVES and
  /// aggregated DF_C edges. Activity-keyed classes are always built.
  std::optional<std::string> property_class_key;

  std::string tie_break = kTieBreak;
  static constexpr const char* kTieBreak = "timestamp,source_row,node_id";

  /// Keys: entity_types, reify_pairs (comma list of "A:B"),
  /// property_class_key, tie_break. Missing keys keep defaults; an empty
  /// reify_pairs value disables reification.
  static BuildConfig from_key_values(const KeyValueFile& kv);
  static BuildConfig load(const std::filesystem::path& path);

  void validate() const;
};

/// Step 1: one Event node per record (in record order), one Log node, one
/// HAS edge Log->Event per event. Event nodes carry the record's activity,
/// timestamp, source_row and string properties.
EventGraph build_event_layer(std::span<const EventRecord> records);

/// Step 2: one Entity node per distinct correlated EntityRef (first
/// appearance order) and one CORR edge per (event, ref) pair.
void correlate_entities(EventGraph& graph, std::span<const EventRecord> records,
                        const BuildConfig& config);

/// Step 3: one REL edge per unordered pair of different-type entities that
/// share at least one event, directed from the earlier type.
void derive_entity_relations(EventGraph& graph, const BuildConfig& config);

/// Step 4: composite Entity node per REL edge whose type pair is configured,
/// with CORR edges from every event correlated to both constituents.
void reify_relations(EventGraph& graph, const BuildConfig& config);

/// Step 5: per entity (composites included), sort its events by the tie
/// break and chain consecutive pairs with DF edges carrying the entity's
/// type and id.
void derive_df(EventGraph& graph, const BuildConfig& config);

/// Step 6: EventClass node per distinct activity, OBSERVES edges to events,
/// and one DF_C edge with a count per (entity type, class pair) that has DF
/// edges. Property classes are added when configured.
void aggregate_classes(EventGraph& graph, const BuildConfig& config);

/// All six steps in order. Deterministic: identical inputs yield
/// structurally identical graphs.
EventGraph build_all(std::span<const EventRecord> records,
                     const BuildConfig& config);

/// True for composite entities created by reify_relations.
bool is_composite_entity(const Node& node);

/// True for class nodes created for a property key (step 6 extras).
bool is_property_class(const Node& node);

}  // namespace medfg
