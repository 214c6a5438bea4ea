#include "dtnkit/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "dtnkit/csv.hpp"

namespace dtn {

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

struct Arrival {
  std::int64_t time = kNever;
  int hops = 0;
};

bool better(const Arrival& x, const Arrival& y) {
  if (x.time != y.time) return x.time < y.time;
  return x.hops < y.hops;
}

struct Prepared {
  std::vector<NodeId> node_of;  // dense index -> NodeId
  std::map<NodeId, int> index;
  std::vector<std::pair<int, int>> edges;               // per record, dense endpoints
  std::vector<std::int64_t> start;                      // per record
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // equal-start runs
};

Prepared prepare(const ContactTrace& trace) {
  Prepared p;
  p.node_of.assign(trace.nodes.begin(), trace.nodes.end());
  for (int i = 0; i < static_cast<int>(p.node_of.size()); ++i)
    p.index.emplace(p.node_of[i], i);
  p.edges.reserve(trace.records.size());
  p.start.reserve(trace.records.size());
  for (const EncounterRecord& rec : trace.records) {
    p.edges.emplace_back(p.index.at(rec.a), p.index.at(rec.b));
    p.start.push_back(rec.interval.start);
  }
  std::size_t i = 0;
  while (i < p.start.size()) {
    std::size_t j = i;
    while (j < p.start.size() && p.start[j] == p.start[i]) ++j;
    p.groups.emplace_back(i, j);
    i = j;
  }
  return p;
}

void validate_workload(const Prepared& p, const Workload& workload) {
  std::set<std::int64_t> ids;
  for (const Message& m : workload.messages) {
    if (!ids.insert(m.id).second)
      throw ValidationError("duplicate message id " + std::to_string(m.id));
    if (!p.index.contains(m.source))
      throw ValidationError("workload references unknown node " + std::to_string(m.source));
  }
}

// Relax every contact of one same-start group until no arrival improves.
void relax_group(const Prepared& p, std::size_t gb, std::size_t ge, std::int64_t T,
                 std::span<Arrival> arr) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = gb; e < ge; ++e) {
      const auto [a, b] = p.edges[e];
      if (arr[a].time <= T) {
        const Arrival cand{T, arr[a].hops + 1};
        if (better(cand, arr[b])) {
          arr[b] = cand;
          changed = true;
        }
      }
      if (arr[b].time <= T) {
        const Arrival cand{T, arr[b].hops + 1};
        if (better(cand, arr[a])) {
          arr[a] = cand;
          changed = true;
        }
      }
    }
  }
}

void sweep_message(const Prepared& p, const Message& m, std::span<Arrival> arr) {
  std::fill(arr.begin(), arr.end(), Arrival{});
  arr[static_cast<std::size_t>(p.index.at(m.source))] = {m.t_create, 0};
  for (const auto& [gb, ge] : p.groups) {
    const std::int64_t T = p.start[gb];
    if (T < m.t_create) continue;
    relax_group(p, gb, ge, T, arr);
  }
}

struct PerMessage {
  std::vector<DeliveryRecord> deliveries;
  MessageOutcome outcome;
};

PerMessage collect(const Prepared& p, const Message& m, std::span<const Arrival> arr) {
  PerMessage out;
  out.outcome.msg = m.id;
  out.outcome.src = m.source;
  const int src_idx = p.index.at(m.source);
  std::int64_t last = m.t_create;
  for (int v = 0; v < static_cast<int>(arr.size()); ++v) {
    if (v == src_idx || arr[v].time == kNever) continue;
    out.deliveries.push_back({m.id, m.source, p.node_of[v], arr[v].time, arr[v].hops});
    out.outcome.reachability = std::max(out.outcome.reachability, arr[v].hops);
    last = std::max(last, arr[v].time);
  }
  out.outcome.transmissions = out.deliveries.size();
  const std::size_t recipients = arr.size() - 1;
  if (recipients == 0) {
    out.outcome.coverage = 1.0;
    out.outcome.delay = 0;
  } else {
    out.outcome.coverage =
        static_cast<double>(out.deliveries.size()) / static_cast<double>(recipients);
    if (out.deliveries.size() == recipients) out.outcome.delay = last - m.t_create;
  }
  return out;
}

RoutingReport assemble(const ContactTrace& trace, const Workload& workload,
                       std::vector<PerMessage> per) {
  RoutingReport report;
  report.encounters = trace.records.size();
  for (PerMessage& pm : per) {
    report.total_transmissions += pm.outcome.transmissions;
    report.outcomes.push_back(pm.outcome);
    report.deliveries.insert(report.deliveries.end(), pm.deliveries.begin(),
                             pm.deliveries.end());
  }
  const std::size_t n_msgs = workload.messages.size();
  if (report.encounters > 0 && n_msgs > 0)
    report.overhead = static_cast<double>(report.total_transmissions) /
                      (static_cast<double>(report.encounters) * static_cast<double>(n_msgs));

  std::vector<double> delays, reach, per_msg_overhead;
  for (const MessageOutcome& o : report.outcomes) {
    if (o.delay) delays.push_back(static_cast<double>(*o.delay));
    reach.push_back(static_cast<double>(o.reachability));
    if (report.encounters > 0)
      per_msg_overhead.push_back(static_cast<double>(o.transmissions) /
                                 static_cast<double>(report.encounters));
  }
  if (!delays.empty()) report.delay_cdf = empirical_cdf(std::span<const double>(delays));
  if (!reach.empty())
    report.reachability_cdf = empirical_cdf(std::span<const double>(reach));
  if (!per_msg_overhead.empty())
    report.overhead_cdf = empirical_cdf(std::span<const double>(per_msg_overhead));
  return report;
}

}  // namespace

Workload broadcast_workload(const ContactTrace& trace) {
  Workload w;
  const auto span = trace_span(trace);
  const std::int64_t t0 = span ? span->start : 0;
  std::int64_t id = 0;
  for (NodeId node : trace.nodes) w.messages.push_back({id++, node, t0});
  return w;
}

RoutingReport run_epidemic(const ContactTrace& trace, const Workload& workload) {
  const Prepared p = prepare(trace);
  validate_workload(p, workload);
  std::vector<PerMessage> per(workload.messages.size());
#pragma omp parallel
  {
    std::vector<Arrival> arr(p.node_of.size());
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(workload.messages.size());
         ++i) {
      const Message& m = workload.messages[static_cast<std::size_t>(i)];
      sweep_message(p, m, arr);
      per[static_cast<std::size_t>(i)] = collect(p, m, arr);
    }
  }
  return assemble(trace, workload, std::move(per));
}

RoutingReport run_epidemic_serial(const ContactTrace& trace, const Workload& workload) {
  const Prepared p = prepare(trace);
  validate_workload(p, workload);
  const std::size_t n_msgs = workload.messages.size();
  const std::size_t n_nodes = p.node_of.size();

  // Joint flood: one arrival table per message, all advanced through the
  // same time sweep, mirroring what a real store-carry-forward run does.
  std::vector<std::vector<Arrival>> arr(n_msgs, std::vector<Arrival>(n_nodes));
  for (std::size_t i = 0; i < n_msgs; ++i) {
    const Message& m = workload.messages[i];
    arr[i][static_cast<std::size_t>(p.index.at(m.source))] = {m.t_create, 0};
  }

  for (const auto& [gb, ge] : p.groups) {
    const std::int64_t T = p.start[gb];
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t e = gb; e < ge; ++e) {
        const auto [a, b] = p.edges[e];
        for (std::size_t i = 0; i < n_msgs; ++i) {
          if (workload.messages[i].t_create > T) continue;
          auto& row = arr[i];
          if (row[a].time <= T) {
            const Arrival cand{T, row[a].hops + 1};
            if (better(cand, row[b])) {
              row[b] = cand;
              changed = true;
            }
          }
          if (row[b].time <= T) {
            const Arrival cand{T, row[b].hops + 1};
            if (better(cand, row[a])) {
              row[a] = cand;
              changed = true;
            }
          }
        }
      }
    }
  }

  std::vector<PerMessage> per(n_msgs);
  for (std::size_t i = 0; i < n_msgs; ++i)
    per[i] = collect(p, workload.messages[i], arr[i]);
  return assemble(trace, workload, std::move(per));
}

std::vector<SummaryRow> summarize(const std::string& trace_name,
                                  const RoutingReport& report) {
  const double n = static_cast<double>(report.outcomes.size());
  double reach_sum = 0, coverage_sum = 0, delay_sum = 0;
  std::size_t covered = 0;
  for (const MessageOutcome& o : report.outcomes) {
    reach_sum += static_cast<double>(o.reachability);
    coverage_sum += o.coverage;
    if (o.delay) {
      delay_sum += static_cast<double>(*o.delay);
      ++covered;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SummaryRow> rows;
  rows.push_back({trace_name, "reachability", n > 0 ? reach_sum / n : 0.0});
  rows.push_back({trace_name, "delay",
                  covered > 0 ? delay_sum / static_cast<double>(covered) : nan});
  rows.push_back({trace_name, "overhead", report.overhead});
  rows.push_back({trace_name, "coverage", n > 0 ? coverage_sum / n : 0.0});
  rows.push_back(
      {trace_name, "transmissions", static_cast<double>(report.total_transmissions)});
  rows.push_back({trace_name, "encounters", static_cast<double>(report.encounters)});
  rows.push_back({trace_name, "messages", static_cast<double>(report.outcomes.size())});
  return rows;
}

std::vector<ComparedRow> compare_summaries(
    const std::vector<std::vector<SummaryRow>>& inputs, const std::string& reference) {
  // Group rows by trace, preserving first-appearance order.
  std::vector<std::pair<std::string, std::vector<SummaryRow>>> traces;
  for (const auto& rows : inputs) {
    for (const SummaryRow& row : rows) {
      auto it = std::find_if(traces.begin(), traces.end(),
                             [&](const auto& t) { return t.first == row.trace; });
      if (it == traces.end()) {
        traces.push_back({row.trace, {row}});
      } else {
        it->second.push_back(row);
      }
    }
  }

  auto ref_it = std::find_if(traces.begin(), traces.end(),
                             [&](const auto& t) { return t.first == reference; });
  if (ref_it == traces.end())
    throw ConfigError("reference", "no summary for trace '" + reference + "'");
  std::rotate(traces.begin(), ref_it, ref_it + 1);
  const std::vector<SummaryRow>& ref_rows = traces.front().second;

  std::vector<ComparedRow> out;
  for (const auto& [name, rows] : traces) {
    for (const SummaryRow& ref : ref_rows) {
      auto it = std::find_if(rows.begin(), rows.end(),
                             [&](const SummaryRow& r) { return r.metric == ref.metric; });
      if (it == rows.end())
        throw ValidationError("trace '" + name + "' has no metric '" + ref.metric + "'");
      ComparedRow cmp{*it, 0.0};
      if (name != reference) {
        if (std::isnan(ref.value) || std::isnan(it->value))
          cmp.deviation_pct = std::numeric_limits<double>::quiet_NaN();
        else if (ref.value == 0.0)
          cmp.deviation_pct =
              it->value == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        else
          cmp.deviation_pct = std::abs(ref.value - it->value) / std::abs(ref.value) * 100.0;
      }
      out.push_back(cmp);
    }
  }
  return out;
}

void write_deliveries(std::span<const DeliveryRecord> deliveries, std::ostream& out) {
  std::string buf("msg,src,dest,t_deliver,hops\n");
  for (const DeliveryRecord& d : deliveries) {
    csv::append_number(buf, d.msg);
    buf.push_back(',');
    csv::append_number(buf, d.src);
    buf.push_back(',');
    csv::append_number(buf, d.dest);
    buf.push_back(',');
    csv::append_number(buf, d.t_deliver);
    buf.push_back(',');
    csv::append_number(buf, static_cast<std::int64_t>(d.hops));
    buf.push_back('\n');
  }
  out << buf;
}

void write_report(std::span<const MessageOutcome> outcomes, std::ostream& out) {
  std::string buf("src,coverage,delay,reachability\n");
  for (const MessageOutcome& o : outcomes) {
    csv::append_number(buf, o.src);
    buf.push_back(',');
    csv::append_number(buf, o.coverage);
    buf.push_back(',');
    if (o.delay)
      csv::append_number(buf, *o.delay);
    else
      buf += "nan";
    buf.push_back(',');
    csv::append_number(buf, static_cast<std::int64_t>(o.reachability));
    buf.push_back('\n');
  }
  out << buf;
}

void write_summary(std::span<const SummaryRow> rows, std::ostream& out) {
  std::string buf("trace,metric,value\n");
  for (const SummaryRow& r : rows) {
    buf += r.trace;
    buf.push_back(',');
    buf += r.metric;
    buf.push_back(',');
    csv::append_number(buf, r.value);
    buf.push_back('\n');
  }
  out << buf;
}

void write_compared(std::span<const ComparedRow> rows, std::ostream& out) {
  std::string buf("trace,metric,value,deviation_pct\n");
  for (const ComparedRow& r : rows) {
    buf += r.row.trace;
    buf.push_back(',');
    buf += r.row.metric;
    buf.push_back(',');
    csv::append_number(buf, r.row.value);
    buf.push_back(',');
    csv::append_number(buf, r.deviation_pct);
    buf.push_back('\n');
  }
  out << buf;
}

std::vector<SummaryRow> read_summary(std::istream& in, const std::string& source) {
  csv::RowReader reader(in, source, "trace,metric,value");
  std::vector<std::string_view> fields;
  std::vector<SummaryRow> rows;
  while (reader.next(fields)) {
    if (fields[0].empty()) reader.fail("field 'trace': empty label");
    if (fields[1].empty()) reader.fail("field 'metric': empty label");
    rows.push_back({std::string(fields[0]), std::string(fields[1]),
                    csv::parse_double(fields[2], reader, "value")});
  }
  return rows;
}

}  // namespace dtn
