#include "medfg/log.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "medfg/errors.hpp"
#include "medfg/tabular.hpp"

namespace medfg {

LogSchema LogSchema::from_key_values(const KeyValueFile& kv) {
  LogSchema schema;
  schema.activity_column = kv.get_or("activity_column", "");
  schema.timestamp_column = kv.get_or("timestamp_column", "");
  schema.entity_columns = kv.get_list("entity_columns");
  schema.property_columns = kv.get_list("property_columns");
  const std::string delim = kv.get_or("delimiter", ",");
  if (delim == "tab") {
    schema.delimiter = '\t';
  } else if (delim.size() == 1) {
    schema.delimiter = delim[0];
  } else {
    throw Error(ErrorCode::BadConfig,
                "delimiter must be a single character or 'tab'");
  }
  schema.validate();
  return schema;
}

LogSchema LogSchema::load(const std::filesystem::path& path) {
  return from_key_values(KeyValueFile::load(path));
}

void LogSchema::validate() const {
  if (activity_column.empty())
    throw Error(ErrorCode::BadConfig, "schema: activity_column is required");
  if (timestamp_column.empty())
    throw Error(ErrorCode::BadConfig, "schema: timestamp_column is required");
  if (entity_columns.empty())
    throw Error(ErrorCode::BadConfig,
                "schema: at least one entity column is required");
  std::set<std::string> seen;
  auto check = [&seen](const std::string& name) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::BadConfig,
                  "schema: duplicate column name '" + name + "'");
    }
  };
  check(activity_column);
  check(timestamp_column);
  for (const auto& c : entity_columns) check(c);
  for (const auto& c : property_columns) check(c);
}

const std::string* EventRecord::entity_id_of(
    std::string_view entity_type) const {
  for (const EntityRef& ref : entities) {
    if (ref.entity_type == entity_type) return &ref.entity_id;
  }
  return nullptr;
}

const std::string* EventRecord::property(std::string_view key) const {
  for (const auto& [k, v] : properties) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<EventRecord> parse_log(std::string_view text,
                                   const LogSchema& schema) {
  schema.validate();
  const auto rows = read_tabular(text, schema.delimiter);
  if (rows.empty()) {
    throw Error(ErrorCode::HeaderMismatch, "input has no header row");
  }

  const std::vector<std::string>& header = rows[0];
  auto column_of = [&header](const std::string& name) {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        if (found != header.size()) {
          throw Error(ErrorCode::HeaderMismatch,
                      "header column '" + name + "' appears more than once");
        }
        found = i;
      }
    }
    if (found == header.size()) {
      throw Error(ErrorCode::HeaderMismatch,
                  "header is missing column '" + name + "'");
    }
    return found;
  };

  const std::size_t activity_col = column_of(schema.activity_column);
  const std::size_t timestamp_col = column_of(schema.timestamp_column);
  std::vector<std::size_t> entity_cols;
  for (const auto& name : schema.entity_columns)
    entity_cols.push_back(column_of(name));
  std::vector<std::size_t> property_cols;
  for (const auto& name : schema.property_columns)
    property_cols.push_back(column_of(name));

  std::vector<EventRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::vector<std::string>& cells = rows[r];
    const std::size_t row_no = r;  // 1-based data-row index
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::RaggedRow,
                  "row " + std::to_string(row_no) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }

    EventRecord record;
    record.source_row = row_no;
    record.activity = cells[activity_col];
    if (record.activity.empty()) {
      throw Error(ErrorCode::EmptyActivity,
                  "row " + std::to_string(row_no) + " has an empty activity");
    }
    const auto ts = Timestamp::parse(cells[timestamp_col]);
    if (!ts) {
      throw Error(ErrorCode::BadTimestamp,
                  "row " + std::to_string(row_no) + ": cannot parse '" +
                      cells[timestamp_col] + "'");
    }
    record.timestamp = *ts;

    for (std::size_t i = 0; i < entity_cols.size(); ++i) {
      const std::string& cell = cells[entity_cols[i]];
      if (!cell.empty()) {
        record.entities.push_back(EntityRef{schema.entity_columns[i], cell});
      }
    }
    if (record.entities.empty()) {
      throw Error(ErrorCode::NoEntities,
                  "row " + std::to_string(row_no) +
                      " references no entity (all entity cells empty)");
    }

    for (std::size_t i = 0; i < property_cols.size(); ++i) {
      const std::string& cell = cells[property_cols[i]];
      if (!cell.empty()) {
        record.properties.emplace_back(schema.property_columns[i], cell);
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

ValidationReport validate_log(std::span<const EventRecord> records) {
  ValidationReport report;
  report.record_count = records.size();
  std::map<std::string, std::size_t> counts;
  std::set<std::string> activities;
  for (const EventRecord& record : records) {
    activities.insert(record.activity);
    for (const EntityRef& ref : record.entities) ++counts[ref.entity_type];
    if (!report.min_time || record.timestamp < *report.min_time)
      report.min_time = record.timestamp;
    if (!report.max_time || record.timestamp > *report.max_time)
      report.max_time = record.timestamp;
  }
  report.entity_type_counts.assign(counts.begin(), counts.end());
  report.activities.assign(activities.begin(), activities.end());
  return report;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  out << "records: " << record_count << "\n";
  out << "distinct activities: " << activities.size() << "\n";
  if (min_time && max_time) {
    out << "time range: " << min_time->to_string() << " .. "
        << max_time->to_string() << "\n";
  } else {
    out << "time range: (empty)\n";
  }
  out << "entity references:\n";
  for (const auto& [type, count] : entity_type_counts) {
    out << "  " << type << ": " << count << "\n";
  }
  return std::move(out).str();
}

}  // namespace medfg
