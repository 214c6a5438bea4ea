#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtn {

// Node identities are dense non-negative integers; raw labels (MAC addresses,
// hostnames) are mapped to them at parse time and the dictionary is emitted
// as a sidecar file.
using NodeId = std::int64_t;
using LocationId = std::string;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input-file error carrying the 1-based line number it was detected on.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Model/pipeline configuration error naming the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Time interval in integer seconds since the trace epoch. Duration must be
/// strictly positive everywhere an interval is stored; a point interval has
/// no measure and therefore never counts as presence or contact.
struct TimeInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t duration() const { return end - start; }
  bool valid() const { return start < end; }

  friend auto operator<=>(const TimeInterval&, const TimeInterval&) = default;
};

/// Intersection with strictly positive measure, or nothing. Intervals that
/// merely touch (end == start) do not intersect.
std::optional<TimeInterval> intersect(TimeInterval a, TimeInterval b);

/// Minimal sorted disjoint cover of the union. Overlapping or touching
/// intervals are coalesced. Idempotent.
std::vector<TimeInterval> merge_intervals(std::vector<TimeInterval> intervals);

/// One node's online presence at one location over one time interval.
struct SessionRecord {
  NodeId node = 0;
  LocationId location;
  TimeInterval interval;

  friend auto operator<=>(const SessionRecord&, const SessionRecord&) = default;
};

/// A pairwise transfer opportunity. Pairs are canonical: a < b.
struct EncounterRecord {
  NodeId a = 0;
  NodeId b = 0;
  TimeInterval interval;

  friend auto operator<=>(const EncounterRecord&, const EncounterRecord&) = default;
};

/// Canonical encounter sequence: records sorted by (start, a, b), per-pair
/// intervals disjoint with positive gaps between them. `nodes` may contain
/// nodes that never encounter anyone.
struct ContactTrace {
  std::set<NodeId> nodes;
  std::vector<EncounterRecord> records;

  friend bool operator==(const ContactTrace&, const ContactTrace&) = default;
};

/// Builds a canonical ContactTrace from raw encounter rows: orders each pair
/// (a < b), merges per-pair overlapping or touching intervals, sorts by
/// (start, a, b). `extra_nodes` adds isolated nodes to the node set.
ContactTrace canonicalize_contacts(std::vector<EncounterRecord> records,
                                   std::set<NodeId> extra_nodes = {});

/// [first record start, last record end], or nothing for an empty trace.
std::optional<TimeInterval> trace_span(const ContactTrace& trace);

/// Throws ValidationError if any ContactTrace invariant is violated.
void validate(const ContactTrace& trace);

}  // namespace dtn
