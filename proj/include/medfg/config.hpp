#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medfg {

/// Minimal key-value configuration text:
///   # comment
///   key = value
/// Values run to end of line; whitespace around keys and values is trimmed.
/// A repeated key keeps the last occurrence.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  const std::string* find(std::string_view key) const;
  std::string get_or(std::string_view key, std::string_view fallback) const;

  /// Comma-separated list value; empty or missing value yields an empty list.
  std::vector<std::string> get_list(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string trim(std::string_view text);
std::vector<std::string> split_list(std::string_view text, char separator);

/// Whole file as a string; throws FileNotFound when unreadable.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace medfg
