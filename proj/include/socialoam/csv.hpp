#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socialoam::csv {

/// A header row plus data rows. Blank lines and lines starting with `#` are
/// skipped. Quoted fields follow RFC 4180 within a single line.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for error messages.
  std::vector<std::size_t> lines;

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;
};

Table read(std::istream& in);
Table read_file(const std::string& path);
std::vector<std::string> split_line(const std::string& line);

/// Quotes a field if it contains a delimiter, quote, or newline.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace socialoam::csv
