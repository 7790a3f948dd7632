#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medfg/config.hpp"
#include "medfg/timestamp.hpp"

namespace medfg {

/// Column layout of a multi-entity event log. Each entity column names an
/// entity type; a non-empty cell in it is an entity id of that type.
struct LogSchema {
  std::string activity_column;
  std::string timestamp_column;
  std::vector<std::string> entity_columns;    // at least one
  std::vector<std::string> property_columns;  // may be empty
  char delimiter = ',';

  /// Keys: activity_column, timestamp_column, entity_columns,
  /// property_columns (comma lists), delimiter (single char or "tab").
  static LogSchema from_key_values(const KeyValueFile& kv);
  static LogSchema load(const std::filesystem::path& path);

  /// Column names must be pairwise distinct and entity_columns non-empty.
  void validate() const;
};

/// (entity type, entity id) reference to one process entity.
struct EntityRef {
  std::string entity_type;
  std::string entity_id;

  auto operator<=>(const EntityRef&) const = default;
};

/// One row of a multi-entity event log. Empty cells produce no entity ref
/// and no property entry; a record always references at least one entity.
struct EventRecord {
  std::string activity;
  Timestamp timestamp;
  std::vector<EntityRef> entities;
  std::vector<std::pair<std::string, std::string>> properties;  // ordered
  std::size_t source_row = 0;  // 1-based data-row index

  const std::string* entity_id_of(std::string_view entity_type) const;
  const std::string* property(std::string_view key) const;

  bool operator==(const EventRecord&) const = default;
};

/// Parses delimiter-separated text with a header row. Records come back in
/// file order regardless of timestamps. Row numbers in errors are 1-based
/// data-row indexes (the header is row 0).
std::vector<EventRecord> parse_log(std::string_view text,
                                   const LogSchema& schema);

/// Descriptive statistics; never mutates or rejects anything.
struct ValidationReport {
  std::size_t record_count = 0;
  std::vector<std::pair<std::string, std::size_t>>
      entity_type_counts;  // sorted by type; counts entity references
  std::optional<Timestamp> min_time;
  std::optional<Timestamp> max_time;
  std::vector<std::string> activities;  // distinct, sorted

  std::string to_string() const;
};

ValidationReport validate_log(std::span<const EventRecord> records);

}  // namespace medfg
