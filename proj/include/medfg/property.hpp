#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "medfg/timestamp.hpp"

namespace medfg {

/// Scalar property value: null, string, integer, decimal, or timestamp.
using PropertyValue =
    std::variant<std::monostate, std::string, std::int64_t, double, Timestamp>;

std::string_view property_type_name(const PropertyValue& value);

/// String-keyed map that preserves insertion order. Graphs stay deterministic
/// because every iteration over properties replays insertion order.
class PropertyMap {
 public:
  using Entry = std::pair<std::string, PropertyValue>;

  PropertyMap() = default;
  PropertyMap(std::initializer_list<Entry> init) : entries_(init) {}

  /// Inserts or overwrites in place (position of an existing key is kept).
  void set(std::string key, PropertyValue value);

  const PropertyValue* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  // Typed accessors; return nullptr when the key is absent or of another type.
  const std::string* get_string(std::string_view key) const;
  const std::int64_t* get_int(std::string_view key) const;
  const double* get_decimal(std::string_view key) const;
  const Timestamp* get_timestamp(std::string_view key) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const PropertyMap&) const = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace medfg
