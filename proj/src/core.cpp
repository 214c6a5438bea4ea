#include "dtnkit/core.hpp"

#include <algorithm>
#include <map>

namespace dtn {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

ConfigError::ConfigError(const std::string& key, const std::string& message)
    : std::runtime_error("config key '" + key + "': " + message), key_(key) {}

std::optional<TimeInterval> intersect(TimeInterval a, TimeInterval b) {
  TimeInterval out{std::max(a.start, b.start), std::min(a.end, b.end)};
  if (!out.valid()) return std::nullopt;
  return out;
}

std::vector<TimeInterval> merge_intervals(std::vector<TimeInterval> intervals) {
  if (intervals.empty()) return intervals;
  std::sort(intervals.begin(), intervals.end());
  std::vector<TimeInterval> out;
  out.reserve(intervals.size());
  out.push_back(intervals.front());
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    TimeInterval& cur = out.back();
    const TimeInterval& next = intervals[i];
    if (next.start <= cur.end) {
      cur.end = std::max(cur.end, next.end);
    } else {
      out.push_back(next);
    }
  }
  return out;
}

ContactTrace canonicalize_contacts(std::vector<EncounterRecord> records,
                                   std::set<NodeId> extra_nodes) {
  ContactTrace trace;
  trace.nodes = std::move(extra_nodes);

  std::map<std::pair<NodeId, NodeId>, std::vector<TimeInterval>> per_pair;
  for (EncounterRecord& r : records) {
    if (r.a == r.b) throw ValidationError("encounter with a == b (node " + std::to_string(r.a) + ")");
    if (!r.interval.valid())
      throw ValidationError("encounter interval with non-positive duration");
    if (r.a > r.b) std::swap(r.a, r.b);
    per_pair[{r.a, r.b}].push_back(r.interval);
  }

  for (auto& [pair, intervals] : per_pair) {
    trace.nodes.insert(pair.first);
    trace.nodes.insert(pair.second);
    for (const TimeInterval& iv : merge_intervals(std::move(intervals)))
      trace.records.push_back({pair.first, pair.second, iv});
  }

  std::sort(trace.records.begin(), trace.records.end(),
            [](const EncounterRecord& x, const EncounterRecord& y) {
              return std::tie(x.interval.start, x.a, x.b) < std::tie(y.interval.start, y.a, y.b);
            });
  return trace;
}

std::optional<TimeInterval> trace_span(const ContactTrace& trace) {
  if (trace.records.empty()) return std::nullopt;
  std::int64_t start = trace.records.front().interval.start;
  std::int64_t end = start;
  for (const EncounterRecord& r : trace.records) end = std::max(end, r.interval.end);
  return TimeInterval{start, end};
}

void validate(const ContactTrace& trace) {
  std::map<std::pair<NodeId, NodeId>, std::int64_t> last_end;
  const EncounterRecord* prev = nullptr;
  for (const EncounterRecord& r : trace.records) {
    if (r.a >= r.b) throw ValidationError("pair not in canonical order");
    if (!r.interval.valid()) throw ValidationError("non-positive encounter duration");
    if (!trace.nodes.count(r.a) || !trace.nodes.count(r.b))
      throw ValidationError("record references node missing from node set");
    if (prev && std::tie(prev->interval.start, prev->a, prev->b) >
                    std::tie(r.interval.start, r.a, r.b))
      throw ValidationError("records not sorted by (start, a, b)");
    auto [it, fresh] = last_end.try_emplace({r.a, r.b}, r.interval.end);
    if (!fresh) {
      if (r.interval.start <= it->second)
        throw ValidationError("per-pair intervals overlap or touch");
      it->second = r.interval.end;
    }
    prev = &r;
  }
}

}  // namespace dtn
