#include "medfg/property.hpp"

namespace medfg {

std::string_view property_type_name(const PropertyValue& value) {
  switch (value.index()) {
    case 0: return "null";
    case 1: return "string";
    case 2: return "integer";
    case 3: return "decimal";
    case 4: return "timestamp";
  }
  return "unknown";
}

void PropertyMap::set(std::string key, PropertyValue value) {
  for (auto& entry : entries_) {
    if (entry.first == key) {
      entry.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

const PropertyValue* PropertyMap::find(std::string_view key) const {
  for (const auto& entry : entries_) {
    if (entry.first == key) return &entry.second;
  }
  return nullptr;
}

const std::string* PropertyMap::get_string(std::string_view key) const {
  const PropertyValue* v = find(key);
  return v ? std::get_if<std::string>(v) : nullptr;
}

const std::int64_t* PropertyMap::get_int(std::string_view key) const {
  const PropertyValue* v = find(key);
  return v ? std::get_if<std::int64_t>(v) : nullptr;
}

const double* PropertyMap::get_decimal(std::string_view key) const {
  const PropertyValue* v = find(key);
  return v ? std::get_if<double>(v) : nullptr;
}

const Timestamp* PropertyMap::get_timestamp(std::string_view key) const {
  const PropertyValue* v = find(key);
  return v ? std::get_if<Timestamp>(v) : nullptr;
}

}  // namespace medfg
