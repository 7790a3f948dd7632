#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace medfg {

/// Naive wall-clock timestamp with second precision. No timezone handling:
/// values compare as written, which matches the zone-less timestamps of the
/// input format.
struct Timestamp {
  std::int64_t seconds = 0;  // since 1970-01-01T00:00:00

  /// Accepts "YYYY-MM-DDTHH:MM:SS" (also with ' ' instead of 'T') and bare
  /// "YYYY-MM-DD", which is read as midnight.
  static std::optional<Timestamp> parse(std::string_view text);

  std::string to_string() const;  // always "YYYY-MM-DDTHH:MM:SS"

  auto operator<=>(const Timestamp&) const = default;
};

}  // namespace medfg
