#include "dtnkit/csv.hpp"

#include <algorithm>
#include <charconv>

namespace dtn::csv {

namespace {

void split(std::string_view row, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = row.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(row.substr(pos));
      return;
    }
    out.push_back(row.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

RowReader::RowReader(std::istream& in, std::string source, std::string_view expected_header)
    : in_(in), source_(std::move(source)) {
  if (!std::getline(in_, buffer_)) {
    ++line_;
    fail("missing header (expected '" + std::string(expected_header) + "')");
  }
  ++line_;
  if (strip_cr(buffer_) != expected_header)
    fail("bad header '" + buffer_ + "' (expected '" + std::string(expected_header) + "')");
  columns_ = std::count(expected_header.begin(), expected_header.end(), ',') + 1;
}

bool RowReader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, buffer_)) {
    ++line_;
    std::string_view row = strip_cr(buffer_);
    if (row.empty()) continue;
    split(row, fields);
    if (fields.size() != columns_)
      fail("expected " + std::to_string(columns_) + " fields, got " + std::to_string(fields.size()));
    return true;
  }
  return false;
}

void RowReader::fail(const std::string& message) const {
  throw ParseError(source_, line_, message);
}

std::int64_t parse_int(std::string_view field, const RowReader& ctx, std::string_view what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    ctx.fail("field '" + std::string(what) + "': not an integer: '" + std::string(field) + "'");
  return value;
}

double parse_double(std::string_view field, const RowReader& ctx, std::string_view what) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    ctx.fail("field '" + std::string(what) + "': not a number: '" + std::string(field) + "'");
  return value;
}

void append_number(std::string& out, std::int64_t value) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

void append_number(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

std::string format_number(double value) {
  std::string s;
  append_number(s, value);
  return s;
}

}  // namespace dtn::csv
