#include "medfg/config.hpp"

#include <fstream>
#include <sstream>

#include "medfg/errors.hpp"

namespace medfg {

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t' ||
                         text[begin] == '\r'))
    ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                         text[end - 1] == '\r'))
    --end;
  return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(separator, start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string item = trim(text.substr(start, pos - start));
    if (!item.empty()) items.push_back(std::move(item));
    start = pos + 1;
  }
  return items;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string line = trim(text.substr(start, pos - start));
    start = pos + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(line_no) +
                                            ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::BadConfig,
                  "line " + std::to_string(line_no) + ": empty key");
    }
    bool replaced = false;
    for (auto& entry : file.entries_) {
      if (entry.first == key) {
        entry.second = value;
        replaced = true;
        break;
      }
    }
    if (!replaced) file.entries_.emplace_back(std::move(key), std::move(value));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const std::string* KeyValueFile::find(std::string_view key) const {
  for (const auto& entry : entries_) {
    if (entry.first == key) return &entry.second;
  }
  return nullptr;
}

std::string KeyValueFile::get_or(std::string_view key,
                                 std::string_view fallback) const {
  const std::string* value = find(key);
  return value ? *value : std::string(fallback);
}

std::vector<std::string> KeyValueFile::get_list(std::string_view key) const {
  const std::string* value = find(key);
  if (value == nullptr) return {};
  return split_list(*value, ',');
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileNotFound,
                "cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::FileNotFound,
                "cannot open file for writing: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(ErrorCode::FileNotFound, "write failed: " + path.string());
  }
}

}  // namespace medfg
