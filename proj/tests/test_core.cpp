#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "dtnkit/core.hpp"
#include "oracles.hpp"

using namespace dtn;

TEST_CASE("interval basics") {
  TimeInterval iv{5, 12};
  CHECK(iv.duration() == 7);
  CHECK(iv.valid());
  CHECK_FALSE(TimeInterval{5, 5}.valid());
  CHECK_FALSE(TimeInterval{9, 2}.valid());
}

TEST_CASE("intersection requires positive overlap") {
  auto r = intersect({44400343, 76404567}, {64300343, 86895742});
  REQUIRE(r.has_value());
  CHECK(r->start == 64300343);
  CHECK(r->end == 76404567);

  CHECK_FALSE(intersect({0, 10}, {10, 20}).has_value());  // touching only
  CHECK_FALSE(intersect({0, 10}, {20, 30}).has_value());

  auto self = intersect({3, 9}, {3, 9});
  REQUIRE(self.has_value());
  CHECK(*self == TimeInterval{3, 9});
}

TEST_CASE("intersection is commutative") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::int64_t> d(0, 50);
  for (int k = 0; k < 500; ++k) {
    TimeInterval a{d(gen), d(gen) + 1};
    TimeInterval b{d(gen), d(gen) + 1};
    a.end += d(gen);
    b.end += d(gen);
    CHECK(intersect(a, b) == intersect(b, a));
  }
}

TEST_CASE("merge coalesces overlapping and touching intervals") {
  auto m = merge_intervals({{0, 10}, {5, 15}});
  REQUIRE(m.size() == 1);
  CHECK(m[0] == TimeInterval{0, 15});

  m = merge_intervals({{0, 10}, {10, 20}});
  REQUIRE(m.size() == 1);
  CHECK(m[0] == TimeInterval{0, 20});

  m = merge_intervals({{35, 50}, {0, 10}, {30, 40}});
  REQUIRE(m.size() == 2);
  CHECK(m[0] == TimeInterval{0, 10});
  CHECK(m[1] == TimeInterval{30, 50});

  CHECK(merge_intervals({}).empty());
}

TEST_CASE("merge matches brute-force union measure and is idempotent") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::int64_t> start_d(0, 80);
  std::uniform_int_distribution<std::int64_t> len_d(1, 25);
  std::uniform_int_distribution<int> count_d(0, 12);
  for (int k = 0; k < 300; ++k) {
    std::vector<TimeInterval> intervals;
    const int n = count_d(gen);
    for (int i = 0; i < n; ++i) {
      const std::int64_t s = start_d(gen);
      intervals.push_back({s, s + len_d(gen)});
    }
    const auto merged = merge_intervals(intervals);

    std::int64_t measure = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      CHECK(merged[i].valid());
      if (i) CHECK(merged[i - 1].end < merged[i].start);  // positive gaps
      measure += merged[i].duration();
    }
    CHECK(measure == oracle::union_measure(intervals));
    CHECK(merge_intervals(merged) == merged);
  }
}

TEST_CASE("canonicalize orients pairs, merges and sorts") {
  std::vector<EncounterRecord> raw{
      {3, 1, {50, 60}},
      {1, 3, {55, 70}},
      {0, 2, {10, 20}},
  };
  const auto trace = canonicalize_contacts(raw, {9});
  REQUIRE(trace.records.size() == 2);
  CHECK(trace.records[0] == EncounterRecord{0, 2, {10, 20}});
  CHECK(trace.records[1] == EncounterRecord{1, 3, {50, 70}});
  CHECK(trace.nodes == std::set<NodeId>{0, 1, 2, 3, 9});
  CHECK_NOTHROW(validate(trace));
}

TEST_CASE("canonicalize rejects self-pairs and empty intervals") {
  CHECK_THROWS_AS(canonicalize_contacts({{2, 2, {0, 5}}}), ValidationError);
  CHECK_THROWS_AS(canonicalize_contacts({{0, 1, {5, 5}}}), ValidationError);
  CHECK_THROWS_AS(canonicalize_contacts({{0, 1, {8, 2}}}), ValidationError);
}

TEST_CASE("canonical order is (start, a, b)") {
  const auto trace = canonicalize_contacts({
      {2, 3, {5, 9}},
      {0, 1, {5, 9}},
      {0, 4, {1, 2}},
      {0, 2, {5, 9}},
  });
  REQUIRE(trace.records.size() == 4);
  CHECK(trace.records[0].interval.start == 1);
  CHECK(trace.records[1] == EncounterRecord{0, 1, {5, 9}});
  CHECK(trace.records[2] == EncounterRecord{0, 2, {5, 9}});
  CHECK(trace.records[3] == EncounterRecord{2, 3, {5, 9}});
}

TEST_CASE("canonicalize is invariant to input order and orientation") {
  std::mt19937_64 gen(23);
  for (int k = 0; k < 100; ++k) {
    auto trace = oracle::random_contact_trace(gen);
    auto shuffled = trace.records;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    for (auto& r : shuffled)
      if (gen() & 1) std::swap(r.a, r.b);
    CHECK(canonicalize_contacts(shuffled, trace.nodes) == trace);
  }
}

TEST_CASE("trace span") {
  CHECK_FALSE(trace_span(ContactTrace{}).has_value());
  const auto trace = canonicalize_contacts({{0, 1, {10, 40}}, {1, 2, {20, 90}}});
  const auto span = trace_span(trace);
  REQUIRE(span.has_value());
  CHECK(*span == TimeInterval{10, 90});
}

TEST_CASE("validate flags broken invariants") {
  ContactTrace t;
  t.nodes = {0, 1};
  t.records = {{0, 1, {10, 20}}, {0, 1, {20, 30}}};  // touching, not merged
  CHECK_THROWS_AS(validate(t), ValidationError);

  t.records = {{0, 1, {30, 40}}, {0, 1, {0, 5}}};  // out of order
  CHECK_THROWS_AS(validate(t), ValidationError);

  t.records = {{1, 0, {0, 5}}};  // wrong orientation
  CHECK_THROWS_AS(validate(t), ValidationError);

  t.records = {{0, 2, {0, 5}}};  // node missing from set
  CHECK_THROWS_AS(validate(t), ValidationError);
}

TEST_CASE("error types carry their context") {
  const ParseError pe("sessions.csv", 17, "bad field");
  CHECK(pe.line() == 17);
  CHECK(std::string(pe.what()).find("sessions.csv") != std::string::npos);
  CHECK(std::string(pe.what()).find("17") != std::string::npos);

  const ConfigError ce("arena.width", "missing required key");
  CHECK(ce.key() == "arena.width");
  CHECK(std::string(ce.what()).find("arena.width") != std::string::npos);
}
