#include "medfg/serialize.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "medfg/errors.hpp"
#include "medfg/tabular.hpp"

namespace medfg {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string dot_node_id(std::string_view kind, std::string_view label,
                        std::uint32_t id) {
  std::string key;
  key.append(kind);
  key.push_back('\x1f');
  key.append(label);
  key.push_back('\x1f');
  key.append(std::to_string(id));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "n%016" PRIx64, fnv1a64(key));
  return std::string(buf);
}

std::string dot_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

ordered_json property_value_to_json(const PropertyValue& value) {
  switch (value.index()) {
    case 0: return nullptr;
    case 1: return std::get<std::string>(value);
    case 2: return std::get<std::int64_t>(value);
    case 3: return std::get<double>(value);
    case 4:
      return ordered_json{{"$timestamp", std::get<Timestamp>(value).to_string()}};
  }
  return nullptr;
}

PropertyValue property_value_from_json(const ordered_json& j,
                                       const std::string& where) {
  if (j.is_null()) return std::monostate{};
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_object() && j.size() == 1 && j.contains("$timestamp") &&
      j["$timestamp"].is_string()) {
    const auto ts = Timestamp::parse(j["$timestamp"].get<std::string>());
    if (!ts) {
      throw Error(ErrorCode::MalformedDump,
                  where + ": bad $timestamp value");
    }
    return *ts;
  }
  throw Error(ErrorCode::MalformedDump,
              where + ": unsupported property value");
}

PropertyMap properties_from_json(const ordered_json& j,
                                 const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::MalformedDump, where + ": properties must be an object");
  }
  PropertyMap props;
  for (const auto& [key, value] : j.items()) {
    props.set(key, property_value_from_json(value, where + ".properties." + key));
  }
  return props;
}

}  // namespace

const std::string* Palette::find(std::string_view entity_type) const {
  for (const auto& [type, color] : colors) {
    if (type == entity_type) return &color;
  }
  return nullptr;
}

void Palette::set(std::string entity_type, std::string color) {
  for (auto& [type, existing] : colors) {
    if (type == entity_type) {
      existing = std::move(color);
      return;
    }
  }
  colors.emplace_back(std::move(entity_type), std::move(color));
}

Palette Palette::defaults() {
  Palette palette;
  palette.set("Logistic", "blue");
  palette.set("Laboratory_Measurement", "green");
  palette.set("Prescriptions", "orange");
  palette.set("Diagnosis", "purple");
  palette.set("Admission", "red");
  palette.set("Patient", "black");
  palette.set("Patient|Admission", "firebrick");
  return palette;
}

std::string to_dot(const DfgView& view, const Palette& palette) {
  for (const DfgEdge& edge : view.edges) {
    if (palette.find(edge.entity_type) == nullptr) {
      throw Error(ErrorCode::MissingColor,
                  "palette has no color for entity type '" + edge.entity_type +
                      "'");
    }
  }

  std::vector<const DfgNode*> nodes;
  nodes.reserve(view.nodes.size());
  for (const DfgNode& node : view.nodes) nodes.push_back(&node);
  std::sort(nodes.begin(), nodes.end(),
            [](const DfgNode* a, const DfgNode* b) {
              return std::tie(a->label, a->id) < std::tie(b->label, b->id);
            });

  const char* kind_tag =
      view.level == DfgLevel::Class ? "class" : "event";
  auto node_label = [&](std::uint32_t id) -> const DfgNode* {
    for (const DfgNode& node : view.nodes) {
      if (node.id == id) return &node;
    }
    return nullptr;
  };

  std::vector<const DfgEdge*> edges;
  edges.reserve(view.edges.size());
  for (const DfgEdge& edge : view.edges) edges.push_back(&edge);
  std::sort(edges.begin(), edges.end(),
            [&](const DfgEdge* a, const DfgEdge* b) {
              const DfgNode* as = node_label(a->src);
              const DfgNode* ad = node_label(a->dst);
              const DfgNode* bs = node_label(b->src);
              const DfgNode* bd = node_label(b->dst);
              const std::string empty;
              const std::string& asl = as ? as->label : empty;
              const std::string& adl = ad ? ad->label : empty;
              const std::string& bsl = bs ? bs->label : empty;
              const std::string& bdl = bd ? bd->label : empty;
              return std::tie(asl, a->src, adl, a->dst, a->entity_type,
                              a->entity_id) <
                     std::tie(bsl, b->src, bdl, b->dst, b->entity_type,
                              b->entity_id);
            });

  std::ostringstream out;
  out << "digraph dfg {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=" << (view.level == DfgLevel::Class ? "box" : "ellipse")
      << ", style=filled, fillcolor=white];\n";
  for (const DfgNode* node : nodes) {
    out << "  " << dot_node_id(kind_tag, node->label, node->id) << " [label=\""
        << dot_escape(node->label) << "\"";
    if (!node->classification.empty()) {
      if (const std::string* color = palette.find(node->classification)) {
        out << ", fillcolor=\"" << *color << "\"";
      }
    }
    out << "];\n";
  }
  for (const DfgEdge* edge : edges) {
    const DfgNode* src = node_label(edge->src);
    const DfgNode* dst = node_label(edge->dst);
    const std::string src_label = src ? src->label : std::string();
    const std::string dst_label = dst ? dst->label : std::string();
    out << "  " << dot_node_id(kind_tag, src_label, edge->src) << " -> "
        << dot_node_id(kind_tag, dst_label, edge->dst) << " [color=\""
        << *palette.find(edge->entity_type) << "\", label=\"";
    if (view.level == DfgLevel::Class) {
      out << edge->count;
    } else {
      out << dot_escape(edge->entity_id);
    }
    out << "\"];\n";
  }
  out << "}\n";
  return std::move(out).str();
}

std::string graph_to_json(const EventGraph& graph) {
  ordered_json dump;
  dump["format"] = "event-graph";
  dump["version"] = 1;
  dump["nodes"] = ordered_json::array();
  for (const Node& node : graph.nodes()) {
    ordered_json jn;
    jn["id"] = node.id.value;
    jn["kind"] = std::string(node_kind_name(node.kind));
    ordered_json props = ordered_json::object();
    for (const auto& [key, value] : node.properties) {
      props[key] = property_value_to_json(value);
    }
    jn["properties"] = std::move(props);
    dump["nodes"].push_back(std::move(jn));
  }
  dump["edges"] = ordered_json::array();
  for (const Edge& edge : graph.edges()) {
    ordered_json je;
    je["id"] = edge.id.value;
    je["kind"] = std::string(edge_kind_name(edge.kind));
    je["src"] = edge.src.value;
    je["dst"] = edge.dst.value;
    ordered_json props = ordered_json::object();
    for (const auto& [key, value] : edge.properties) {
      props[key] = property_value_to_json(value);
    }
    je["properties"] = std::move(props);
    dump["edges"].push_back(std::move(je));
  }
  return dump.dump(2) + "\n";
}

EventGraph graph_from_json(std::string_view text) {
  ordered_json dump;
  try {
    dump = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDump,
                std::string("not valid JSON: ") + e.what());
  }
  if (!dump.is_object() || dump.value("format", "") != "event-graph" ||
      !dump.contains("version") || dump["version"] != 1) {
    throw Error(ErrorCode::MalformedDump,
                "missing or unsupported format/version header");
  }
  if (!dump.contains("nodes") || !dump["nodes"].is_array() ||
      !dump.contains("edges") || !dump["edges"].is_array()) {
    throw Error(ErrorCode::MalformedDump, "nodes/edges arrays missing");
  }

  EventGraph graph;
  std::size_t index = 0;
  try {
    for (const auto& jn : dump["nodes"]) {
      const std::string where = "nodes[" + std::to_string(index) + "]";
      if (!jn.is_object() || !jn.contains("id") ||
          !jn["id"].is_number_unsigned() || !jn.contains("kind") ||
          !jn["kind"].is_string() || !jn.contains("properties")) {
        throw Error(ErrorCode::MalformedDump, where + ": bad node object");
      }
      NodeKind kind;
      if (!parse_node_kind(jn["kind"].get<std::string>(), kind)) {
        throw Error(ErrorCode::MalformedDump,
                    where + ": unknown node kind '" +
                        jn["kind"].get<std::string>() + "'");
      }
      const NodeId id =
          graph.add_node(kind, properties_from_json(jn["properties"], where));
      if (id.value != jn["id"].get<std::uint32_t>()) {
        throw Error(ErrorCode::MalformedDump,
                    where + ": node ids must be dense and ascending");
      }
      ++index;
    }
    index = 0;
    for (const auto& je : dump["edges"]) {
      const std::string where = "edges[" + std::to_string(index) + "]";
      if (!je.is_object() || !je.contains("id") ||
          !je["id"].is_number_unsigned() || !je.contains("kind") ||
          !je["kind"].is_string() || !je.contains("src") ||
          !je["src"].is_number_unsigned() || !je.contains("dst") ||
          !je["dst"].is_number_unsigned() || !je.contains("properties")) {
        throw Error(ErrorCode::MalformedDump, where + ": bad edge object");
      }
      EdgeKind kind;
      if (!parse_edge_kind(je["kind"].get<std::string>(), kind)) {
        throw Error(ErrorCode::MalformedDump,
                    where + ": unknown edge kind '" +
                        je["kind"].get<std::string>() + "'");
      }
      const EdgeId id =
          graph.add_edge(kind, NodeId{je["src"].get<std::uint32_t>()},
                         NodeId{je["dst"].get<std::uint32_t>()},
                         properties_from_json(je["properties"], where));
      if (id.value != je["id"].get<std::uint32_t>()) {
        throw Error(ErrorCode::MalformedDump,
                    where + ": edge ids must be dense and ascending");
      }
      ++index;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedDump) throw;
    // Kind/property violations from add_node/add_edge mean the dump itself
    // is inconsistent.
    throw Error(ErrorCode::MalformedDump, std::string(e.what()));
  }
  return graph;
}

std::string log_to_tabular(std::span<const EventRecord> records,
                           const LogSchema& schema) {
  schema.validate();
  std::vector<std::string> header;
  header.push_back(schema.activity_column);
  header.push_back(schema.timestamp_column);
  for (const auto& c : schema.entity_columns) header.push_back(c);
  for (const auto& c : schema.property_columns) header.push_back(c);

  std::string out = format_row(header, schema.delimiter);
  for (const EventRecord& record : records) {
    std::vector<std::string> cells;
    cells.push_back(record.activity);
    cells.push_back(record.timestamp.to_string());
    for (const auto& column : schema.entity_columns) {
      const std::string* id = record.entity_id_of(column);
      cells.push_back(id ? *id : std::string());
    }
    for (const auto& column : schema.property_columns) {
      const std::string* value = record.property(column);
      cells.push_back(value ? *value : std::string());
    }
    // Anything the schema cannot carry would be lost silently; refuse.
    for (const EntityRef& ref : record.entities) {
      if (std::find(schema.entity_columns.begin(), schema.entity_columns.end(),
                    ref.entity_type) == schema.entity_columns.end()) {
        throw Error(ErrorCode::BadConfig,
                    "record " + std::to_string(record.source_row) +
                        " references entity type '" + ref.entity_type +
                        "' which has no schema column");
      }
    }
    for (const auto& [key, value] : record.properties) {
      if (std::find(schema.property_columns.begin(),
                    schema.property_columns.end(),
                    key) == schema.property_columns.end()) {
        throw Error(ErrorCode::BadConfig,
                    "record " + std::to_string(record.source_row) +
                        " carries property '" + key +
                        "' which has no schema column");
      }
    }
    out += format_row(cells, schema.delimiter);
  }
  return out;
}

}  // namespace medfg
