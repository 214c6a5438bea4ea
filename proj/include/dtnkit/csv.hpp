#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "dtnkit/core.hpp"

namespace dtn::csv {

/// Line-oriented comma-separated reader. Checks the header on construction
/// and reports errors with the source name and 1-based line number. Fields
/// are views into an internal buffer valid until the next call.
class RowReader {
 public:
  RowReader(std::istream& in, std::string source, std::string_view expected_header);

  /// Fills `fields` with the next data row; false at end of input.
  /// Throws ParseError when the column count does not match the header.
  bool next(std::vector<std::string_view>& fields);

  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::istream& in_;
  std::string source_;
  std::string buffer_;
  std::size_t line_ = 0;
  std::size_t columns_ = 0;
};

std::int64_t parse_int(std::string_view field, const RowReader& ctx, std::string_view what);
double parse_double(std::string_view field, const RowReader& ctx, std::string_view what);

/// Shortest round-trip decimal formatting (locale-independent).
void append_number(std::string& out, std::int64_t value);
void append_number(std::string& out, double value);
std::string format_number(double value);

}  // namespace dtn::csv
