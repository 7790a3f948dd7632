#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medfg {

/// Delimiter-separated text with standard quoting: cells containing the
/// delimiter, a double quote, or a line break are wrapped in double quotes,
/// and embedded quotes are doubled. Quoted cells may span lines. "\r\n" and
/// "\n" both end a row; fully empty lines are skipped. Cells are taken
/// verbatim, no whitespace trimming.
std::vector<std::vector<std::string>> read_tabular(std::string_view text,
                                                   char delimiter);

/// One row including the trailing newline, quoting cells only when needed.
std::string format_row(std::span<const std::string> cells, char delimiter);

}  // namespace medfg
