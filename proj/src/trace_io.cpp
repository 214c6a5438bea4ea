#include "dtnkit/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <tuple>

#include "dtnkit/csv.hpp"

namespace dtn {

namespace {

constexpr std::string_view kSessionsHeader = "node,location,start,end";
constexpr std::string_view kContactsHeader = "a,b,start,end";

std::optional<NodeId> as_plain_id(std::string_view label) {
  NodeId value = 0;
  auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
  if (ec != std::errc{} || ptr != label.data() + label.size() || value < 0) return std::nullopt;
  return value;
}

// Two-pass label assignment: keep decimal labels verbatim when the whole file
// uses them, otherwise dense first-appearance ids.
class LabelMapper {
 public:
  void see(std::string_view label) {
    if (label.empty()) all_plain_ = false;
    if (!as_plain_id(label)) all_plain_ = false;
    auto [it, fresh] = order_.try_emplace(std::string(label), order_.size());
    (void)it;
    if (fresh) first_seen_.emplace_back(label);
  }

  NodeDictionary finalize() const {
    NodeDictionary dict;
    if (all_plain_) {
      for (const std::string& label : first_seen_) {
        NodeId id = *as_plain_id(label);
        dict.ids.emplace(label, id);
        dict.labels.emplace(id, label);
      }
    } else {
      NodeId next = 0;
      for (const std::string& label : first_seen_) {
        dict.ids.emplace(label, next);
        dict.labels.emplace(next, label);
        ++next;
      }
    }
    return dict;
  }

 private:
  std::map<std::string, std::size_t> order_;
  std::vector<std::string> first_seen_;
  bool all_plain_ = true;
};

}  // namespace

NodeId NodeDictionary::id_of(const std::string& label) const {
  auto it = ids.find(label);
  if (it == ids.end()) throw ValidationError("unknown node label '" + label + "'");
  return it->second;
}

SessionParse parse_sessions(std::istream& in, const std::string& source,
                            const ParseOptions& opts) {
  csv::RowReader reader(in, source, kSessionsHeader);
  std::vector<std::string_view> fields;

  struct RawRow {
    std::string node;
    LocationId location;
    TimeInterval interval;
  };
  std::vector<RawRow> rows;
  LabelMapper mapper;
  std::size_t skipped = 0;

  while (reader.next(fields)) {
    if (fields[0].empty()) reader.fail("field 'node': empty label");
    if (fields[1].empty()) reader.fail("field 'location': empty label");
    std::int64_t start = csv::parse_int(fields[2], reader, "start");
    std::int64_t end = csv::parse_int(fields[3], reader, "end");
    if (start >= end) {
      if (opts.skip_invalid) {
        ++skipped;
        continue;
      }
      reader.fail("session with non-positive duration (start " + std::to_string(start) +
                  ", end " + std::to_string(end) + ")");
    }
    mapper.see(fields[0]);
    rows.push_back({std::string(fields[0]), std::string(fields[1]), {start, end}});
  }

  SessionParse out;
  out.skipped = skipped;
  out.nodes = mapper.finalize();

  // Merge per (node, location) and emit in deterministic order.
  std::map<std::pair<NodeId, LocationId>, std::vector<TimeInterval>> grouped;
  for (const RawRow& row : rows)
    grouped[{out.nodes.id_of(row.node), row.location}].push_back(row.interval);
  for (auto& [key, intervals] : grouped)
    for (const TimeInterval& iv : merge_intervals(std::move(intervals)))
      out.records.push_back({key.first, key.second, iv});
  return out;
}

ContactParse parse_contacts(std::istream& in, const std::string& source,
                            const ParseOptions& opts) {
  csv::RowReader reader(in, source, kContactsHeader);
  std::vector<std::string_view> fields;

  struct RawRow {
    std::string a, b;
    TimeInterval interval;
  };
  std::vector<RawRow> rows;
  LabelMapper mapper;
  std::size_t skipped = 0;

  while (reader.next(fields)) {
    if (fields[0].empty()) reader.fail("field 'a': empty label");
    if (fields[1].empty()) reader.fail("field 'b': empty label");
    std::int64_t start = csv::parse_int(fields[2], reader, "start");
    std::int64_t end = csv::parse_int(fields[3], reader, "end");
    if (fields[0] == fields[1] || start >= end) {
      if (opts.skip_invalid) {
        ++skipped;
        continue;
      }
      if (fields[0] == fields[1])
        reader.fail("self-encounter: a == b ('" + std::string(fields[0]) + "')");
      reader.fail("encounter with non-positive duration (start " + std::to_string(start) +
                  ", end " + std::to_string(end) + ")");
    }
    mapper.see(fields[0]);
    mapper.see(fields[1]);
    rows.push_back({std::string(fields[0]), std::string(fields[1]), {start, end}});
  }

  ContactParse out;
  out.skipped = skipped;
  out.nodes = mapper.finalize();

  std::vector<EncounterRecord> records;
  records.reserve(rows.size());
  for (const RawRow& row : rows)
    records.push_back({out.nodes.id_of(row.a), out.nodes.id_of(row.b), row.interval});
  out.trace = canonicalize_contacts(std::move(records));
  return out;
}

ContactTrace sessions_to_encounters(const std::vector<SessionRecord>& sessions) {
  // Per (location, node): merged online intervals at that location.
  std::map<LocationId, std::map<NodeId, std::vector<TimeInterval>>> at_location;
  std::set<NodeId> all_nodes;
  for (const SessionRecord& s : sessions) {
    if (!s.interval.valid()) throw ValidationError("session with non-positive duration");
    at_location[s.location][s.node].push_back(s.interval);
    all_nodes.insert(s.node);
  }

  std::vector<EncounterRecord> raw;
  for (auto& [location, per_node] : at_location) {
    (void)location;
    std::vector<std::pair<NodeId, std::vector<TimeInterval>>> nodes;
    nodes.reserve(per_node.size());
    for (auto& [node, intervals] : per_node)
      nodes.emplace_back(node, merge_intervals(std::move(intervals)));

    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        // Both interval lists are sorted and disjoint; sweep with two cursors.
        const auto& iv_a = nodes[i].second;
        const auto& iv_b = nodes[j].second;
        std::size_t x = 0, y = 0;
        while (x < iv_a.size() && y < iv_b.size()) {
          if (auto common = intersect(iv_a[x], iv_b[y]))
            raw.push_back({nodes[i].first, nodes[j].first, *common});
          if (iv_a[x].end < iv_b[y].end)
            ++x;
          else
            ++y;
        }
      }
    }
  }
  return canonicalize_contacts(std::move(raw), std::move(all_nodes));
}

void write_sessions(const std::vector<SessionRecord>& records, std::ostream& out) {
  std::string buf(kSessionsHeader);
  buf.push_back('\n');
  for (const SessionRecord& r : records) {
    csv::append_number(buf, r.node);
    buf.push_back(',');
    buf += r.location;
    buf.push_back(',');
    csv::append_number(buf, r.interval.start);
    buf.push_back(',');
    csv::append_number(buf, r.interval.end);
    buf.push_back('\n');
  }
  out << buf;
}

void write_contacts(const ContactTrace& trace, std::ostream& out) {
  std::string buf(kContactsHeader);
  buf.push_back('\n');
  for (const EncounterRecord& r : trace.records) {
    csv::append_number(buf, r.a);
    buf.push_back(',');
    csv::append_number(buf, r.b);
    buf.push_back(',');
    csv::append_number(buf, r.interval.start);
    buf.push_back(',');
    csv::append_number(buf, r.interval.end);
    buf.push_back('\n');
  }
  out << buf;
}

void write_node_map(const NodeDictionary& dict, std::ostream& out) {
  std::string buf;
  for (const auto& [id, label] : dict.labels) {
    buf += label;
    buf.push_back(',');
    csv::append_number(buf, id);
    buf.push_back('\n');
  }
  out << buf;
}

}  // namespace dtn
