#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dtnkit/core.hpp"

namespace dtn {

// Empirical CDF: (value, P[X <= value]) at each distinct sample value.
struct CdfSeries {
  std::vector<std::pair<double, double>> points;
};

// Mean fraction of a node's online time spent at its k-th most visited
// location, averaged over nodes (rank 1 = favourite location).
struct RankedFractionCurve {
  std::vector<std::pair<std::size_t, double>> entries;
};

// P[node present at a location in bin t+g | present in bin t], per gap g.
struct ReappearanceCurve {
  std::vector<std::pair<std::int64_t, double>> entries;
};

// Two-part fit of the sample CCDF: straight line on (log v, log ccdf) below
// the split value, straight line on (v, log ccdf) above it.  A part with
// fewer than two usable points keeps slope = r2 = 0.
struct TailFit {
  double powerlaw_slope = 0.0;
  double head_r2 = 0.0;
  double exp_rate = 0.0;
  double tail_r2 = 0.0;
  double split_value = 0.0;
  std::size_t head_points = 0;
  std::size_t tail_points = 0;
  std::size_t samples = 0;
};

struct InterMeeting {
  std::vector<std::int64_t> gaps;  // pooled over all pairs
  std::map<std::pair<NodeId, NodeId>, std::vector<std::int64_t>> per_pair;
};

InterMeeting inter_meeting_times(const ContactTrace& trace);

std::vector<std::int64_t> meeting_durations(const ContactTrace& trace);

RankedFractionCurve location_preference(const std::vector<SessionRecord>& sessions);

// bin >= 1; max_gap a positive multiple of bin.  Bins are anchored at the
// earliest session start; presence means positive overlap with the bin.
ReappearanceCurve reappearance_probability(const std::vector<SessionRecord>& sessions,
                                           std::int64_t bin, std::int64_t max_gap);

CdfSeries empirical_cdf(std::span<const double> samples);
CdfSeries empirical_cdf(std::span<const std::int64_t> samples);

TailFit tail_fit(std::span<const double> samples, double head_quantile = 0.9);
TailFit tail_fit(std::span<const std::int64_t> samples, double head_quantile = 0.9);

void write_cdf(const CdfSeries& series, std::ostream& out);
void write_prefs(const RankedFractionCurve& curve, std::ostream& out);
void write_reappearance(const ReappearanceCurve& curve, std::ostream& out);
void write_tailfit(const TailFit& fit, std::ostream& out);

}  // namespace dtn
