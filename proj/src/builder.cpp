#include "medfg/builder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "medfg/errors.hpp"

namespace medfg {
namespace {

struct EntityKey {
  std::string type;
  std::string id;
  bool operator<(const EntityKey& other) const {
    return std::tie(type, id) < std::tie(other.type, other.id);
  }
};

/// Entity types in node-creation order, composites excluded. Creation order
/// follows first appearance in the records, so this reproduces the resolved
/// correlate order of an empty config.
std::vector<std::string> resolved_type_order(const EventGraph& graph,
                                             const BuildConfig& config) {
  if (!config.entity_types_to_correlate.empty())
    return config.entity_types_to_correlate;
  std::vector<std::string> order;
  for (const Node& node : graph.nodes()) {
    if (node.kind != NodeKind::Entity || is_composite_entity(node)) continue;
    const std::string& type = *node.properties.get_string("entity_type");
    if (std::find(order.begin(), order.end(), type) == order.end())
      order.push_back(type);
  }
  return order;
}

struct EventOrderKey {
  Timestamp timestamp;
  std::int64_t source_row;
  std::uint32_t node_id;
  bool operator<(const EventOrderKey& other) const {
    return std::tie(timestamp, source_row, node_id) <
           std::tie(other.timestamp, other.source_row, other.node_id);
  }
};

EventOrderKey order_key(const EventGraph& graph, NodeId event) {
  const Node& node = graph.node(event);
  const Timestamp* ts = node.properties.get_timestamp("timestamp");
  const std::int64_t* row = node.properties.get_int("source_row");
  return EventOrderKey{ts ? *ts : Timestamp{}, row ? *row : 0, event.value};
}

}  // namespace

BuildConfig BuildConfig::from_key_values(const KeyValueFile& kv) {
  BuildConfig config;
  if (kv.find("entity_types") != nullptr)
    config.entity_types_to_correlate = kv.get_list("entity_types");
  if (kv.find("reify_pairs") != nullptr) {
    config.reify_pairs.clear();
    for (const std::string& item : kv.get_list("reify_pairs")) {
      const std::size_t colon = item.find(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 == item.size()) {
        throw Error(ErrorCode::BadConfig,
                    "reify_pairs entries must look like 'TypeA:TypeB', got '" +
                        item + "'");
      }
      config.reify_pairs.emplace_back(trim(item.substr(0, colon)),
                                      trim(item.substr(colon + 1)));
    }
  }
  if (const std::string* key = kv.find("property_class_key")) {
    if (!key->empty()) config.property_class_key = *key;
  }
  config.tie_break = kv.get_or("tie_break", kTieBreak);
  config.validate();
  return config;
}

BuildConfig BuildConfig::load(const std::filesystem::path& path) {
  return from_key_values(KeyValueFile::load(path));
}

void BuildConfig::validate() const {
  if (tie_break != kTieBreak) {
    throw Error(ErrorCode::BadConfig,
                "unsupported tie_break '" + tie_break + "'; only '" +
                    kTieBreak + "' is implemented");
  }
  for (const auto& [a, b] : reify_pairs) {
    if (a.empty() || b.empty() || a == b) {
      throw Error(ErrorCode::BadConfig,
                  "reify pair must name two different entity types");
    }
  }
}

EventGraph build_event_layer(std::span<const EventRecord> records) {
  if (records.empty()) {
    throw Error(ErrorCode::EmptyLog, "cannot build a graph from zero records");
  }
  EventGraph graph;
  for (const EventRecord& record : records) {
    PropertyMap props;
    props.set("activity", record.activity);
    props.set("timestamp", record.timestamp);
    props.set("source_row", static_cast<std::int64_t>(record.source_row));
    for (const auto& [key, value] : record.properties) {
      if (key == "activity" || key == "timestamp" || key == "source_row") {
        throw Error(ErrorCode::BadConfig,
                    "record " + std::to_string(record.source_row) +
                        ": property '" + key +
                        "' collides with a reserved event property");
      }
      props.set(key, value);
    }
    graph.add_node(NodeKind::Event, std::move(props));
  }
  const NodeId log = graph.add_node(NodeKind::Log, {});
  for (std::uint32_t i = 0; i < records.size(); ++i) {
    graph.add_edge(EdgeKind::HAS, log, NodeId{i}, {});
  }
  return graph;
}

void correlate_entities(EventGraph& graph,
                        std::span<const EventRecord> records,
                        const BuildConfig& config) {
  const auto events = graph.nodes_by_kind(NodeKind::Event);
  if (events.size() != records.size()) {
    throw Error(ErrorCode::BadConfig,
                "record list does not match the graph's event layer");
  }
  const bool correlate_all = config.entity_types_to_correlate.empty();
  const std::set<std::string> allowed(config.entity_types_to_correlate.begin(),
                                      config.entity_types_to_correlate.end());

  std::map<EntityKey, NodeId> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::set<EntityKey> seen;  // one CORR per (event, ref) pair
    for (const EntityRef& ref : records[i].entities) {
      if (!correlate_all && !allowed.contains(ref.entity_type)) continue;
      EntityKey key{ref.entity_type, ref.entity_id};
      if (!seen.insert(key).second) continue;
      auto it = index.find(key);
      if (it == index.end()) {
        PropertyMap props;
        props.set("entity_type", ref.entity_type);
        props.set("entity_id", ref.entity_id);
        it = index.emplace(key, graph.add_node(NodeKind::Entity,
                                               std::move(props)))
                 .first;
      }
      graph.add_edge(EdgeKind::CORR, events[i], it->second, {});
    }
  }
}

void derive_entity_relations(EventGraph& graph, const BuildConfig& config) {
  const std::vector<std::string> type_order = resolved_type_order(graph, config);
  auto type_rank = [&type_order](const std::string& type) {
    for (std::size_t i = 0; i < type_order.size(); ++i)
      if (type_order[i] == type) return i;
    return type_order.size();
  };

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const NodeId event : graph.nodes_by_kind(NodeKind::Event)) {
    const auto corr = graph.neighbors(event, EdgeKind::CORR, Direction::Out);
    for (std::size_t i = 0; i < corr.size(); ++i) {
      for (std::size_t j = i + 1; j < corr.size(); ++j) {
        NodeId a = corr[i];
        NodeId b = corr[j];
        const std::string& type_a =
            *graph.node(a).properties.get_string("entity_type");
        const std::string& type_b =
            *graph.node(b).properties.get_string("entity_type");
        if (type_a == type_b) continue;
        if (type_rank(type_b) < type_rank(type_a)) std::swap(a, b);
        const auto key = std::minmax(a.value, b.value);
        if (!seen.insert({key.first, key.second}).second) continue;
        graph.add_edge(EdgeKind::REL, a, b, {});
      }
    }
  }
}

void reify_relations(EventGraph& graph, const BuildConfig& config) {
  if (config.reify_pairs.empty()) return;

  // Snapshot: the loop appends entities and CORR edges.
  std::vector<EdgeId> rel_edges;
  for (const Edge& edge : graph.edges()) {
    if (edge.kind == EdgeKind::REL) rel_edges.push_back(edge.id);
  }

  for (const EdgeId rel : rel_edges) {
    const Edge edge = graph.edge(rel);
    // Copy out constituent data: the node vector reallocates on add_node.
    const std::string src_type =
        *graph.node(edge.src).properties.get_string("entity_type");
    const std::string src_id =
        *graph.node(edge.src).properties.get_string("entity_id");
    const std::string dst_type =
        *graph.node(edge.dst).properties.get_string("entity_type");
    const std::string dst_id =
        *graph.node(edge.dst).properties.get_string("entity_id");

    // Orient constituents by the configured pair order.
    NodeId first = edge.src;
    NodeId second = edge.dst;
    std::string first_type, first_id, second_type, second_id;
    bool matched = false;
    for (const auto& [a, b] : config.reify_pairs) {
      if (src_type == a && dst_type == b) {
        first_type = src_type; first_id = src_id;
        second_type = dst_type; second_id = dst_id;
        matched = true;
        break;
      }
      if (src_type == b && dst_type == a) {
        first = edge.dst; second = edge.src;
        first_type = dst_type; first_id = dst_id;
        second_type = src_type; second_id = src_id;
        matched = true;
        break;
      }
    }
    if (!matched) continue;

    PropertyMap props;
    props.set("entity_type", first_type + "|" + second_type);
    props.set("entity_id", first_id + "|" + second_id);
    props.set("part1_type", first_type);
    props.set("part1_id", first_id);
    props.set("part2_type", second_type);
    props.set("part2_id", second_id);
    const NodeId composite = graph.add_node(NodeKind::Entity, std::move(props));

    // Events correlated to both constituents, ascending id.
    const auto of_first = graph.neighbors(first, EdgeKind::CORR, Direction::In);
    const std::set<NodeId> of_second_set = [&] {
      const auto v = graph.neighbors(second, EdgeKind::CORR, Direction::In);
      return std::set<NodeId>(v.begin(), v.end());
    }();
    std::vector<NodeId> shared;
    for (const NodeId event : of_first) {
      if (of_second_set.contains(event)) shared.push_back(event);
    }
    std::sort(shared.begin(), shared.end());
    for (const NodeId event : shared) {
      graph.add_edge(EdgeKind::CORR, event, composite, {});
    }
  }
}

void derive_df(EventGraph& graph, const BuildConfig& config) {
  config.validate();
  for (const NodeId entity : graph.nodes_by_kind(NodeKind::Entity)) {
    std::vector<NodeId> events =
        graph.neighbors(entity, EdgeKind::CORR, Direction::In);
    std::sort(events.begin(), events.end(), [&graph](NodeId a, NodeId b) {
      return order_key(graph, a) < order_key(graph, b);
    });
    if (events.size() < 2) continue;
    const Node& node = graph.node(entity);
    const std::string& type = *node.properties.get_string("entity_type");
    const std::string& id = *node.properties.get_string("entity_id");
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
      PropertyMap props;
      props.set("entity_type", type);
      props.set("entity_id", id);
      graph.add_edge(EdgeKind::DF, events[i], events[i + 1], std::move(props));
    }
  }
}

void aggregate_classes(EventGraph& graph, const BuildConfig& config) {
  const auto events = graph.nodes_by_kind(NodeKind::Event);

  // Class nodes per distinct activity, first-appearance order.
  std::unordered_map<std::string, NodeId> class_of;
  for (const NodeId event : events) {
    // Copied: add_node reallocates the node vector.
    const std::string activity =
        *graph.node(event).properties.get_string("activity");
    if (class_of.contains(activity)) continue;
    PropertyMap props;
    props.set("activity", activity);
    const NodeId cls = graph.add_node(NodeKind::EventClass, std::move(props));
    class_of.emplace(activity, cls);
  }
  for (const NodeId event : events) {
    const std::string& activity =
        *graph.node(event).properties.get_string("activity");
    graph.add_edge(EdgeKind::OBSERVES, class_of.at(activity), event, {});
  }

  // Aggregate DF into DF_C, keyed by (entity type, src class, dst class),
  // emitted in first-seen order.
  struct Aggregate {
    std::string entity_type;
    NodeId src;
    NodeId dst;
    std::int64_t count = 0;
  };
  std::vector<Aggregate> aggregates;
  std::map<std::tuple<std::string, std::uint32_t, std::uint32_t>, std::size_t>
      slot;
  auto accumulate = [&](const std::string& type, NodeId src_class,
                        NodeId dst_class) {
    const auto key = std::make_tuple(type, src_class.value, dst_class.value);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, aggregates.size());
      aggregates.push_back(Aggregate{type, src_class, dst_class, 1});
    } else {
      ++aggregates[it->second].count;
    }
  };

  for (const Edge& edge : graph.edges()) {
    if (edge.kind != EdgeKind::DF) continue;
    const std::string& type = *edge.properties.get_string("entity_type");
    const std::string& src_activity =
        *graph.node(edge.src).properties.get_string("activity");
    const std::string& dst_activity =
        *graph.node(edge.dst).properties.get_string("activity");
    accumulate(type, class_of.at(src_activity), class_of.at(dst_activity));
  }
  for (const Aggregate& a : aggregates) {
    PropertyMap props;
    props.set("entity_type", a.entity_type);
    props.set("count", a.count);
    graph.add_edge(EdgeKind::DF_C, a.src, a.dst, std::move(props));
  }

  if (!config.property_class_key) return;

  // Property classes: one class node per distinct value of the chosen key,
  // labeled "key=value" to keep class labels unique.
  const std::string& key = *config.property_class_key;
  std::unordered_map<std::string, NodeId> value_class;
  auto value_of = [&graph, &key](NodeId event) {
    return graph.node(event).properties.get_string(key);
  };
  for (const NodeId event : events) {
    const std::string* found = value_of(event);
    if (found == nullptr || value_class.contains(*found)) continue;
    const std::string value = *found;  // copied before add_node reallocates
    PropertyMap props;
    props.set("activity", key + "=" + value);
    props.set("class_key", key);
    const NodeId cls = graph.add_node(NodeKind::EventClass, std::move(props));
    value_class.emplace(value, cls);
  }
  for (const NodeId event : events) {
    const std::string* value = value_of(event);
    if (value != nullptr) {
      graph.add_edge(EdgeKind::OBSERVES, value_class.at(*value), event, {});
    }
  }
  aggregates.clear();
  slot.clear();
  for (const Edge& edge : graph.edges()) {
    if (edge.kind != EdgeKind::DF) continue;
    const std::string* src_value = value_of(edge.src);
    const std::string* dst_value = value_of(edge.dst);
    if (src_value == nullptr || dst_value == nullptr) continue;
    accumulate(*edge.properties.get_string("entity_type"),
               value_class.at(*src_value), value_class.at(*dst_value));
  }
  for (const Aggregate& a : aggregates) {
    PropertyMap props;
    props.set("entity_type", a.entity_type);
    props.set("count", a.count);
    graph.add_edge(EdgeKind::DF_C, a.src, a.dst, std::move(props));
  }
}

EventGraph build_all(std::span<const EventRecord> records,
                     const BuildConfig& config) {
  config.validate();
  EventGraph graph = build_event_layer(records);
  correlate_entities(graph, records, config);
  derive_entity_relations(graph, config);
  reify_relations(graph, config);
  derive_df(graph, config);
  aggregate_classes(graph, config);
  return graph;
}

bool is_composite_entity(const Node& node) {
  return node.kind == NodeKind::Entity &&
         node.properties.contains("part1_type");
}

bool is_property_class(const Node& node) {
  return node.kind == NodeKind::EventClass &&
         node.properties.contains("class_key");
}

}  // namespace medfg
