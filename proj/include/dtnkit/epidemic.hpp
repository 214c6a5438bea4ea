#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtnkit/core.hpp"
#include "dtnkit/stats.hpp"

namespace dtn {

struct Message {
  std::int64_t id = 0;
  NodeId source = 0;
  std::int64_t t_create = 0;
};

// Broadcast semantics: every node other than the source is a recipient.
struct Workload {
  std::vector<Message> messages;
};

// One message per node, created at the first contact start (0 on an empty
// trace), ids assigned in node order.
Workload broadcast_workload(const ContactTrace& trace);

struct DeliveryRecord {
  std::int64_t msg = 0;
  NodeId src = 0;
  NodeId dest = 0;
  std::int64_t t_deliver = 0;
  int hops = 0;
};

struct MessageOutcome {
  std::int64_t msg = 0;
  NodeId src = 0;
  double coverage = 0.0;                // reached recipients / recipients
  std::optional<std::int64_t> delay;    // set iff coverage == 1
  int reachability = 0;                 // max hops over reached; 0 if none
  std::size_t transmissions = 0;
};

struct RoutingReport {
  std::vector<DeliveryRecord> deliveries;  // sorted by (msg, dest)
  std::vector<MessageOutcome> outcomes;    // workload order
  std::size_t total_transmissions = 0;
  std::size_t encounters = 0;
  double overhead = 0.0;  // total_transmissions / (encounters * messages)
  CdfSeries delay_cdf;         // over fully covered messages; may be empty
  CdfSeries reachability_cdf;  // over all messages
  CdfSeries overhead_cdf;      // per-message transmissions / encounters
};

// Deterministic epidemic flood: full exchange at contact start, unbounded
// buffers, minimum (arrival time, hops) per destination with non-strict
// same-timestamp chaining.
RoutingReport run_epidemic(const ContactTrace& trace, const Workload& workload);

// Joint single-pass sweep over all messages; same results, kept as the
// reference for the parallel per-message implementation.
RoutingReport run_epidemic_serial(const ContactTrace& trace, const Workload& workload);

struct SummaryRow {
  std::string trace;
  std::string metric;
  double value = 0.0;
};

std::vector<SummaryRow> summarize(const std::string& trace_name, const RoutingReport& report);

struct ComparedRow {
  SummaryRow row;
  double deviation_pct = 0.0;  // |ref - value| / ref * 100, vs the reference trace
};

// Reorders so the reference trace comes first; throws ConfigError when the
// reference name is absent or a trace misses a metric the reference has.
std::vector<ComparedRow> compare_summaries(const std::vector<std::vector<SummaryRow>>& inputs,
                                           const std::string& reference);

void write_deliveries(std::span<const DeliveryRecord> deliveries, std::ostream& out);
void write_report(std::span<const MessageOutcome> outcomes, std::ostream& out);
void write_summary(std::span<const SummaryRow> rows, std::ostream& out);
void write_compared(std::span<const ComparedRow> rows, std::ostream& out);
std::vector<SummaryRow> read_summary(std::istream& in, const std::string& source);

}  // namespace dtn
