#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dtnkit/core.hpp"
#include "dtnkit/epidemic.hpp"
#include "oracles.hpp"

using namespace dtn;

namespace {

// A -(10..20)- B -(30..40)- C relay chain.
ContactTrace chain_trace() {
  return canonicalize_contacts({{0, 1, {10, 20}}, {1, 2, {30, 40}}});
}

Workload per_node_at(const ContactTrace& trace, std::int64_t t_create) {
  Workload w;
  std::int64_t id = 0;
  for (NodeId n : trace.nodes) w.messages.push_back({id++, n, t_create});
  return w;
}

const DeliveryRecord* find_delivery(const RoutingReport& report, std::int64_t msg,
                                    NodeId dest) {
  for (const auto& d : report.deliveries)
    if (d.msg == msg && d.dest == dest) return &d;
  return nullptr;
}

void check_against_oracle(const ContactTrace& trace, const Workload& workload,
                          const RoutingReport& report) {
  std::size_t expected_deliveries = 0;
  for (const auto& msg : workload.messages) {
    const auto want = oracle::epidemic(trace, msg.source, msg.t_create);
    expected_deliveries += want.size();
    for (const auto& [dest, best] : want) {
      const auto* got = find_delivery(report, msg.id, dest);
      REQUIRE(got != nullptr);
      CHECK(got->t_deliver == best.first);
      CHECK(got->hops == best.second);
      CHECK(got->src == msg.source);
    }
  }
  CHECK(report.deliveries.size() == expected_deliveries);
  CHECK(report.total_transmissions == expected_deliveries);
}

}  // namespace

TEST_CASE("three-node chain floods through the relay") {
  const auto trace = chain_trace();
  const auto report = run_epidemic(trace, per_node_at(trace, 0));

  // Message 0 (source A): B at 10 in 1 hop, C via relay at 30 in 2 hops.
  REQUIRE(find_delivery(report, 0, 1) != nullptr);
  CHECK(find_delivery(report, 0, 1)->t_deliver == 10);
  CHECK(find_delivery(report, 0, 1)->hops == 1);
  REQUIRE(find_delivery(report, 0, 2) != nullptr);
  CHECK(find_delivery(report, 0, 2)->t_deliver == 30);
  CHECK(find_delivery(report, 0, 2)->hops == 2);

  // Message 2 (source C): its only contact starts at 30; A is never reached.
  REQUIRE(find_delivery(report, 2, 1) != nullptr);
  CHECK(find_delivery(report, 2, 1)->t_deliver == 30);
  CHECK(find_delivery(report, 2, 0) == nullptr);

  REQUIRE(report.outcomes.size() == 3);
  CHECK(report.outcomes[0].coverage == doctest::Approx(1.0));
  REQUIRE(report.outcomes[0].delay.has_value());
  CHECK(*report.outcomes[0].delay == 30);
  CHECK(report.outcomes[0].reachability == 2);

  CHECK(report.outcomes[2].coverage == doctest::Approx(0.5));
  CHECK_FALSE(report.outcomes[2].delay.has_value());
  CHECK(report.outcomes[2].reachability == 1);

  CHECK(report.total_transmissions == 5);
  CHECK(report.encounters == 2);
  CHECK(report.overhead == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("empty trace delivers nothing") {
  ContactTrace trace;
  trace.nodes = {0, 1, 2};
  const auto report = run_epidemic(trace, per_node_at(trace, 0));
  CHECK(report.deliveries.empty());
  CHECK(report.total_transmissions == 0);
  CHECK(report.overhead == 0.0);
  for (const auto& o : report.outcomes) {
    CHECK(o.coverage == 0.0);
    CHECK_FALSE(o.delay.has_value());
    CHECK(o.reachability == 0);
  }
}

TEST_CASE("same-timestamp contacts chain within one instant") {
  const auto trace = canonicalize_contacts({{0, 1, {5, 6}}, {1, 2, {5, 6}}});
  const auto report = run_epidemic(trace, per_node_at(trace, 0));
  const auto* d = find_delivery(report, 0, 2);
  REQUIRE(d != nullptr);
  CHECK(d->t_deliver == 5);
  CHECK(d->hops == 2);

  // The hop count is the minimum at the earliest arrival: with a direct
  // same-time contact available, the relay path must not inflate hops.
  const auto direct = canonicalize_contacts({{0, 1, {5, 6}}, {1, 2, {5, 6}}, {0, 2, {5, 6}}});
  const auto r2 = run_epidemic(direct, per_node_at(direct, 0));
  REQUIRE(find_delivery(r2, 0, 2) != nullptr);
  CHECK(find_delivery(r2, 0, 2)->t_deliver == 5);
  CHECK(find_delivery(r2, 0, 2)->hops == 1);
}

TEST_CASE("messages are not eligible before creation") {
  const auto trace = chain_trace();
  Workload w;
  w.messages.push_back({0, 0, 15});  // misses the 10..20 contact start
  const auto report = run_epidemic(trace, w);
  CHECK(find_delivery(report, 0, 1) == nullptr);
  CHECK(find_delivery(report, 0, 2) == nullptr);

  Workload w2;
  w2.messages.push_back({0, 0, 10});  // exactly at the start: eligible
  const auto r2 = run_epidemic(trace, w2);
  REQUIRE(find_delivery(r2, 0, 1) != nullptr);
  CHECK(find_delivery(r2, 0, 1)->t_deliver == 10);
}

TEST_CASE("single contact, two messages, overhead one") {
  const auto trace = canonicalize_contacts({{0, 1, {0, 10}}});
  const auto report = run_epidemic(trace, per_node_at(trace, 0));
  CHECK(report.total_transmissions == 2);
  CHECK(report.overhead == doctest::Approx(1.0));
}

TEST_CASE("broadcast workload defaults to the first contact start") {
  const auto trace = chain_trace();
  const auto w = broadcast_workload(trace);
  REQUIRE(w.messages.size() == 3);
  for (std::size_t i = 0; i < w.messages.size(); ++i) {
    CHECK(w.messages[i].id == static_cast<std::int64_t>(i));
    CHECK(w.messages[i].t_create == 10);
  }
  CHECK(w.messages[0].source == 0);
  CHECK(w.messages[2].source == 2);

  CHECK(broadcast_workload(ContactTrace{}).messages.empty());
  ContactTrace lonely;
  lonely.nodes = {7};
  const auto wl = broadcast_workload(lonely);
  REQUIRE(wl.messages.size() == 1);
  CHECK(wl.messages[0].t_create == 0);
}

TEST_CASE("workload validation") {
  const auto trace = chain_trace();
  Workload unknown;
  unknown.messages.push_back({0, 99, 0});
  CHECK_THROWS_AS(run_epidemic(trace, unknown), ValidationError);

  Workload dup;
  dup.messages.push_back({0, 0, 0});
  dup.messages.push_back({0, 1, 0});
  CHECK_THROWS_AS(run_epidemic(trace, dup), ValidationError);
}

TEST_CASE("parallel, serial and oracle agree on random traces") {
  std::mt19937_64 gen(2024);
  for (int k = 0; k < 150; ++k) {
    const auto trace = oracle::random_contact_trace(gen);
    const auto workload = broadcast_workload(trace);
    const auto par = run_epidemic(trace, workload);
    const auto ser = run_epidemic_serial(trace, workload);

    REQUIRE(par.deliveries.size() == ser.deliveries.size());
    for (std::size_t i = 0; i < par.deliveries.size(); ++i) {
      CHECK(par.deliveries[i].msg == ser.deliveries[i].msg);
      CHECK(par.deliveries[i].dest == ser.deliveries[i].dest);
      CHECK(par.deliveries[i].t_deliver == ser.deliveries[i].t_deliver);
      CHECK(par.deliveries[i].hops == ser.deliveries[i].hops);
    }
    CHECK(par.total_transmissions == ser.total_transmissions);

    check_against_oracle(trace, workload, par);
  }
}

TEST_CASE("adding a contact never hurts") {
  std::mt19937_64 gen(321);
  std::uniform_int_distribution<std::int64_t> start_d(0, 200);
  std::uniform_int_distribution<std::int64_t> len_d(1, 40);
  for (int k = 0; k < 60; ++k) {
    const auto trace = oracle::random_contact_trace(gen, 8, 30);
    if (trace.nodes.size() < 2) continue;
    const auto workload = broadcast_workload(trace);
    const auto before = run_epidemic(trace, workload);

    std::vector<NodeId> nodes(trace.nodes.begin(), trace.nodes.end());
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    NodeId a = nodes[pick(gen)], b = nodes[pick(gen)];
    if (a == b) continue;
    auto records = trace.records;
    const std::int64_t s = start_d(gen);
    records.push_back({a, b, {s, s + len_d(gen)}});
    const auto bigger = canonicalize_contacts(std::move(records), trace.nodes);
    const auto after = run_epidemic(bigger, workload);

    for (std::size_t i = 0; i < workload.messages.size(); ++i) {
      CHECK(after.outcomes[i].coverage >= before.outcomes[i].coverage - 1e-12);
      for (const auto& d : before.deliveries) {
        if (d.msg != workload.messages[i].id) continue;
        const auto* nd = find_delivery(after, d.msg, d.dest);
        REQUIRE(nd != nullptr);
        CHECK(nd->t_deliver <= d.t_deliver);
      }
    }
  }
}

TEST_CASE("repeated runs are identical") {
  std::mt19937_64 gen(11111);
  const auto trace = oracle::random_contact_trace(gen);
  const auto workload = broadcast_workload(trace);
  const auto a = run_epidemic(trace, workload);
  const auto b = run_epidemic(trace, workload);
  REQUIRE(a.deliveries.size() == b.deliveries.size());
  for (std::size_t i = 0; i < a.deliveries.size(); ++i) {
    CHECK(a.deliveries[i].t_deliver == b.deliveries[i].t_deliver);
    CHECK(a.deliveries[i].hops == b.deliveries[i].hops);
  }
  CHECK(a.total_transmissions == b.total_transmissions);
  CHECK(a.overhead == b.overhead);
}

TEST_CASE("deliveries are sorted and never duplicated") {
  std::mt19937_64 gen(55);
  for (int k = 0; k < 40; ++k) {
    const auto trace = oracle::random_contact_trace(gen);
    const auto report = run_epidemic(trace, broadcast_workload(trace));
    for (std::size_t i = 1; i < report.deliveries.size(); ++i) {
      const auto& p = report.deliveries[i - 1];
      const auto& c = report.deliveries[i];
      CHECK(std::pair{p.msg, p.dest} < std::pair{c.msg, c.dest});
      CHECK(c.dest != c.src);
    }
  }
}

TEST_CASE("summaries carry the per-trace metrics") {
  const auto trace = chain_trace();
  const auto report = run_epidemic(trace, per_node_at(trace, 0));
  const auto rows = summarize("chain", report);

  auto value_of = [&](const std::string& metric) {
    for (const auto& r : rows)
      if (r.metric == metric) return r.value;
    FAIL("missing metric ", metric);
    return 0.0;
  };
  CHECK(value_of("reachability") == doctest::Approx((2 + 1 + 1) / 3.0));
  CHECK(value_of("delay") == doctest::Approx(30.0));  // covered sources: A and B
  CHECK(value_of("overhead") == doctest::Approx(5.0 / 6.0));
  CHECK(value_of("coverage") == doctest::Approx((1.0 + 1.0 + 0.5) / 3.0));
  CHECK(value_of("transmissions") == doctest::Approx(5.0));
  CHECK(value_of("encounters") == doctest::Approx(2.0));
  CHECK(value_of("messages") == doctest::Approx(3.0));
  for (const auto& r : rows) CHECK(r.trace == "chain");
}

TEST_CASE("comparison reproduces the reference deviation") {
  std::vector<SummaryRow> real{{"real", "reachability", 11.0}};
  std::vector<SummaryRow> model{{"tvc", "reachability", 7.0}};
  const auto compared = compare_summaries({model, real}, "real");

  REQUIRE(compared.size() == 2);
  CHECK(compared[0].row.trace == "real");  // reference rotates to the front
  CHECK(compared[0].deviation_pct == doctest::Approx(0.0));
  CHECK(compared[1].row.trace == "tvc");
  CHECK(compared[1].deviation_pct == doctest::Approx(100.0 * 4.0 / 11.0).epsilon(1e-9));
  CHECK(std::abs(compared[1].deviation_pct - 36.36) < 0.01);
}

TEST_CASE("comparison edge cases") {
  std::vector<SummaryRow> a{{"a", "delay", 89.0}};
  std::vector<SummaryRow> b{{"b", "delay", 24.0}};
  const auto compared = compare_summaries({a, b}, "a");
  CHECK(std::abs(compared[1].deviation_pct - 73.03) < 0.01);

  // Identical reports: all deviations zero.
  std::vector<SummaryRow> c{{"c", "delay", 24.0}, {"c", "overhead", 0.5}};
  std::vector<SummaryRow> d{{"d", "delay", 24.0}, {"d", "overhead", 0.5}};
  for (const auto& row : compare_summaries({c, d}, "c"))
    CHECK(row.deviation_pct == doctest::Approx(0.0));

  CHECK_THROWS_AS(compare_summaries({a, b}, "nope"), ConfigError);

  std::vector<SummaryRow> missing{{"m", "overhead", 1.0}};
  CHECK_THROWS_AS(compare_summaries({a, missing}, "a"), ValidationError);
}

TEST_CASE("report writers and the summary round-trip") {
  const auto trace = chain_trace();
  const auto report = run_epidemic(trace, per_node_at(trace, 0));

  std::ostringstream out;
  write_deliveries(report.deliveries, out);
  CHECK(out.str() ==
        "msg,src,dest,t_deliver,hops\n"
        "0,0,1,10,1\n"
        "0,0,2,30,2\n"
        "1,1,0,10,1\n"
        "1,1,2,30,1\n"
        "2,2,1,30,1\n");

  out.str("");
  write_report(report.outcomes, out);
  CHECK(out.str() ==
        "src,coverage,delay,reachability\n"
        "0,1,30,2\n"
        "1,1,30,1\n"
        "2,0.5,nan,1\n");

  const auto rows = summarize("chain", report);
  out.str("");
  write_summary(rows, out);
  std::istringstream in(out.str());
  const auto back = read_summary(in, "summary");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].trace == rows[i].trace);
    CHECK(back[i].metric == rows[i].metric);
    CHECK(back[i].value == doctest::Approx(rows[i].value).epsilon(1e-12));
  }
}

TEST_CASE("cdf series in the report match the outcomes") {
  const auto trace = chain_trace();
  const auto report = run_epidemic(trace, per_node_at(trace, 0));

  // Delay CDF over fully covered sources only (A and B, both delay 30).
  REQUIRE(report.delay_cdf.points.size() == 1);
  CHECK(report.delay_cdf.points[0] == std::pair{30.0, 1.0});

  // Reachability CDF over all sources: {2, 1, 1}.
  REQUIRE(report.reachability_cdf.points.size() == 2);
  CHECK(report.reachability_cdf.points[0].first == 1.0);
  CHECK(report.reachability_cdf.points[0].second == doctest::Approx(2.0 / 3.0));

  // Per-message overhead CDF averages back to the global overhead.
  double mean = 0.0, prev = 0.0;
  for (const auto& [v, p] : report.overhead_cdf.points) {
    mean += v * (p - prev);
    prev = p;
  }
  CHECK(mean == doctest::Approx(report.overhead));
}
