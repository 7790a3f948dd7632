#include "medfg/tabular.hpp"

#include "medfg/errors.hpp"

namespace medfg {

std::vector<std::vector<std::string>> read_tabular(std::string_view text,
                                                   char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool cell_started = false;  // current row has content beyond nothing

  enum class State { FieldStart, Unquoted, Quoted, QuoteEnd };
  State state = State::FieldStart;

  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&] {
    if (cell_started || !row.empty()) {
      end_cell();
      rows.push_back(std::move(row));
      row.clear();
    }
    cell_started = false;
    state = State::FieldStart;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool newline = c == '\n' || (c == '\r' && state != State::Quoted);
    switch (state) {
      case State::FieldStart:
      case State::Unquoted:
        if (newline) {
          end_row();
          if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else if (c == delimiter) {
          end_cell();
          cell_started = true;
          state = State::FieldStart;
        } else if (c == '"' && state == State::FieldStart && cell.empty()) {
          cell_started = true;
          state = State::Quoted;
        } else {
          cell.push_back(c);
          cell_started = true;
          state = State::Unquoted;
        }
        break;
      case State::Quoted:
        if (c == '"') {
          state = State::QuoteEnd;
        } else {
          cell.push_back(c);
        }
        break;
      case State::QuoteEnd:
        if (c == '"') {  // doubled quote
          cell.push_back('"');
          state = State::Quoted;
        } else if (newline) {
          end_row();
          if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else if (c == delimiter) {
          end_cell();
          cell_started = true;
          state = State::FieldStart;
        } else {
          throw Error(ErrorCode::BadQuoting,
                      "unexpected character after closing quote in row " +
                          std::to_string(rows.size() + 1));
        }
        break;
    }
  }
  if (state == State::Quoted) {
    throw Error(ErrorCode::BadQuoting, "unterminated quoted cell in row " +
                                           std::to_string(rows.size() + 1));
  }
  end_row();
  return rows;
}

std::string format_row(std::span<const std::string> cells, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    const std::string& cell = cells[i];
    const bool needs_quotes =
        cell.find(delimiter) != std::string::npos ||
        cell.find('"') != std::string::npos ||
        cell.find('\n') != std::string::npos ||
        cell.find('\r') != std::string::npos;
    if (!needs_quotes) {
      out += cell;
      continue;
    }
    out.push_back('"');
    for (char c : cell) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  out.push_back('\n');
  return out;
}

}  // namespace medfg
