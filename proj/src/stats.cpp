#include "dtnkit/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "dtnkit/csv.hpp"

namespace dtn {

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
  bool ok = false;
};

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  LineFit fit;
  const std::size_t n = xs.size();
  if (n < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) return fit;
  fit.slope = sxy / sxx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.ok = true;
  return fit;
}

// Fixed-width bitset over time bins, one word per 64 bins.
class BinSet {
 public:
  explicit BinSet(std::size_t bins) : bins_(bins), words_((bins + 63) / 64, 0) {}

  void reset() { std::fill(words_.begin(), words_.end(), 0); }

  void set_range(std::size_t first, std::size_t last) {  // inclusive
    for (std::size_t b = first; b <= last && b < bins_; ++b)
      words_[b >> 6] |= std::uint64_t{1} << (b & 63);
  }

  // Number of set bits with index <= limit.
  std::size_t count_upto(std::size_t limit) const {
    if (bins_ == 0) return 0;
    limit = std::min(limit, bins_ - 1);
    std::size_t total = 0;
    const std::size_t full = limit >> 6;
    for (std::size_t w = 0; w < full; ++w) total += std::popcount(words_[w]);
    const std::uint64_t mask = (limit & 63) == 63
                                   ? ~std::uint64_t{0}
                                   : ((std::uint64_t{1} << ((limit & 63) + 1)) - 1);
    total += std::popcount(words_[full] & mask);
    return total;
  }

  // Number of indices t with bit t and bit t+shift both set.
  std::size_t count_joint(std::size_t shift) const {
    if (shift >= bins_) return 0;
    const std::size_t word_shift = shift >> 6;
    const unsigned bit_shift = static_cast<unsigned>(shift & 63);
    std::size_t total = 0;
    for (std::size_t w = 0; w + word_shift < words_.size(); ++w) {
      std::uint64_t shifted = words_[w + word_shift] >> bit_shift;
      if (bit_shift != 0 && w + word_shift + 1 < words_.size())
        shifted |= words_[w + word_shift + 1] << (64 - bit_shift);
      total += std::popcount(words_[w] & shifted);
    }
    return total;
  }

 private:
  std::size_t bins_;
  std::vector<std::uint64_t> words_;
};

CdfSeries cdf_from_sorted(std::vector<double> sorted) {
  if (sorted.empty()) throw ValidationError("no samples");
  CdfSeries series;
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0, cum = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    cum += j - i;
    series.points.emplace_back(sorted[i], static_cast<double>(cum) / n);
    i = j;
  }
  return series;
}

}  // namespace

InterMeeting inter_meeting_times(const ContactTrace& trace) {
  InterMeeting out;
  std::map<std::pair<NodeId, NodeId>, TimeInterval> last;
  for (const EncounterRecord& rec : trace.records) {
    const std::pair<NodeId, NodeId> key{rec.a, rec.b};
    auto it = last.find(key);
    if (it != last.end()) {
      out.per_pair[key].push_back(rec.interval.start - it->second.end);
      it->second = rec.interval;
    } else {
      last.emplace(key, rec.interval);
    }
  }
  for (const auto& [key, gaps] : out.per_pair)
    out.gaps.insert(out.gaps.end(), gaps.begin(), gaps.end());
  return out;
}

std::vector<std::int64_t> meeting_durations(const ContactTrace& trace) {
  std::vector<std::int64_t> out;
  out.reserve(trace.records.size());
  for (const EncounterRecord& rec : trace.records) out.push_back(rec.interval.duration());
  return out;
}

RankedFractionCurve location_preference(const std::vector<SessionRecord>& sessions) {
  std::map<NodeId, std::map<LocationId, std::int64_t>> per_node;
  for (const SessionRecord& s : sessions)
    per_node[s.node][s.location] += s.interval.duration();

  std::vector<std::vector<double>> fractions;  // per node, rank-ordered
  std::size_t max_rank = 0;
  for (const auto& [node, locs] : per_node) {
    (void)node;
    double total = 0;
    std::vector<double> seconds;
    seconds.reserve(locs.size());
    for (const auto& [loc, secs] : locs) {
      (void)loc;
      seconds.push_back(static_cast<double>(secs));
      total += static_cast<double>(secs);
    }
    std::sort(seconds.rbegin(), seconds.rend());
    for (double& s : seconds) s /= total;
    max_rank = std::max(max_rank, seconds.size());
    fractions.push_back(std::move(seconds));
  }

  RankedFractionCurve curve;
  if (fractions.empty()) return curve;
  for (std::size_t rank = 0; rank < max_rank; ++rank) {
    double sum = 0;
    for (const auto& f : fractions)
      if (rank < f.size()) sum += f[rank];
    curve.entries.emplace_back(rank + 1, sum / static_cast<double>(fractions.size()));
  }
  return curve;
}

ReappearanceCurve reappearance_probability(const std::vector<SessionRecord>& sessions,
                                           std::int64_t bin, std::int64_t max_gap) {
  if (bin < 1) throw ConfigError("bin", "must be >= 1");
  if (max_gap < bin || max_gap % bin != 0)
    throw ConfigError("max-gap", "must be a positive multiple of the bin width");

  const std::size_t n_gaps = static_cast<std::size_t>(max_gap / bin);
  ReappearanceCurve curve;
  curve.entries.reserve(n_gaps);

  if (sessions.empty()) {
    for (std::size_t m = 1; m <= n_gaps; ++m)
      curve.entries.emplace_back(static_cast<std::int64_t>(m) * bin, 0.0);
    return curve;
  }

  std::int64_t span_start = sessions.front().interval.start;
  std::int64_t span_end = sessions.front().interval.end;
  for (const SessionRecord& s : sessions) {
    span_start = std::min(span_start, s.interval.start);
    span_end = std::max(span_end, s.interval.end);
  }
  const std::size_t n_bins =
      static_cast<std::size_t>((span_end - span_start + bin - 1) / bin);
  if (n_bins > (std::size_t{1} << 28))
    throw ConfigError("bin", "span/bin yields " + std::to_string(n_bins) +
                                 " bins; use a wider bin");

  std::map<std::pair<NodeId, LocationId>, std::vector<TimeInterval>> grouped;
  for (const SessionRecord& s : sessions) grouped[{s.node, s.location}].push_back(s.interval);

  std::vector<std::size_t> numer(n_gaps + 1, 0), denom(n_gaps + 1, 0);
  std::vector<std::pair<NodeId, LocationId>> keys;
  keys.reserve(grouped.size());
  for (const auto& [key, intervals] : grouped) {
    (void)intervals;
    keys.push_back(key);
  }

#pragma omp parallel
  {
    BinSet bits(n_bins);
    std::vector<std::size_t> local_numer(n_gaps + 1, 0), local_denom(n_gaps + 1, 0);
#pragma omp for schedule(dynamic) nowait
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(keys.size()); ++k) {
      bits.reset();
      for (const TimeInterval& iv : grouped.find(keys[k])->second) {
        // Bins with positive overlap: [start, end) intersected with each bin.
        const std::size_t first = static_cast<std::size_t>((iv.start - span_start) / bin);
        const std::size_t last = static_cast<std::size_t>((iv.end - 1 - span_start) / bin);
        bits.set_range(first, last);
      }
      for (std::size_t m = 1; m <= n_gaps; ++m) {
        if (m >= n_bins) break;
        local_numer[m] += bits.count_joint(m);
        local_denom[m] += bits.count_upto(n_bins - 1 - m);
      }
    }
#pragma omp critical
    for (std::size_t m = 1; m <= n_gaps; ++m) {
      numer[m] += local_numer[m];
      denom[m] += local_denom[m];
    }
  }

  for (std::size_t m = 1; m <= n_gaps; ++m) {
    const double p = denom[m] == 0 ? 0.0
                                   : static_cast<double>(numer[m]) /
                                         static_cast<double>(denom[m]);
    curve.entries.emplace_back(static_cast<std::int64_t>(m) * bin, p);
  }
  return curve;
}

CdfSeries empirical_cdf(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return cdf_from_sorted(std::move(sorted));
}

CdfSeries empirical_cdf(std::span<const std::int64_t> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return cdf_from_sorted(std::move(sorted));
}

TailFit tail_fit(std::span<const double> samples, double head_quantile) {
  if (samples.size() < 50)
    throw ValidationError("tail fit needs >= 50 samples, got " +
                          std::to_string(samples.size()));
  if (!(head_quantile > 0.0 && head_quantile < 1.0))
    throw ConfigError("head-quantile", "must lie strictly between 0 and 1");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    throw ValidationError("tail fit degenerate: all samples equal");

  const double n = static_cast<double>(sorted.size());
  // CCDF = P[X >= v] at each distinct value v.
  std::vector<std::pair<double, double>> ccdf;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    ccdf.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / n);
    i = j;
  }

  TailFit fit;
  fit.samples = sorted.size();
  const std::size_t q_index = std::min(
      sorted.size() - 1,
      static_cast<std::size_t>(std::ceil(head_quantile * n)) == 0
          ? std::size_t{0}
          : static_cast<std::size_t>(std::ceil(head_quantile * n)) - 1);
  fit.split_value = sorted[q_index];

  std::vector<double> hx, hy, tx, ty;
  for (const auto& [value, p] : ccdf) {
    if (value <= fit.split_value && value > 0) {
      hx.push_back(std::log(value));
      hy.push_back(std::log(p));
    }
    if (value >= fit.split_value) {
      tx.push_back(value);
      ty.push_back(std::log(p));
    }
  }
  fit.head_points = hx.size();
  fit.tail_points = tx.size();

  const LineFit head = least_squares(hx, hy);
  if (head.ok) {
    fit.powerlaw_slope = head.slope;
    fit.head_r2 = head.r2;
  }
  const LineFit tail = least_squares(tx, ty);
  if (tail.ok) {
    fit.exp_rate = tail.slope;
    fit.tail_r2 = tail.r2;
  }
  return fit;
}

TailFit tail_fit(std::span<const std::int64_t> samples, double head_quantile) {
  std::vector<double> as_double(samples.begin(), samples.end());
  return tail_fit(std::span<const double>(as_double), head_quantile);
}

void write_cdf(const CdfSeries& series, std::ostream& out) {
  std::string buf("value,p\n");
  for (const auto& [value, p] : series.points) {
    csv::append_number(buf, value);
    buf.push_back(',');
    csv::append_number(buf, p);
    buf.push_back('\n');
  }
  out << buf;
}

void write_prefs(const RankedFractionCurve& curve, std::ostream& out) {
  std::string buf("rank,fraction\n");
  for (const auto& [rank, fraction] : curve.entries) {
    csv::append_number(buf, static_cast<std::int64_t>(rank));
    buf.push_back(',');
    csv::append_number(buf, fraction);
    buf.push_back('\n');
  }
  out << buf;
}

void write_reappearance(const ReappearanceCurve& curve, std::ostream& out) {
  std::string buf("gap_s,prob\n");
  for (const auto& [gap, prob] : curve.entries) {
    csv::append_number(buf, gap);
    buf.push_back(',');
    csv::append_number(buf, prob);
    buf.push_back('\n');
  }
  out << buf;
}

void write_tailfit(const TailFit& fit, std::ostream& out) {
  std::string buf;
  auto emit = [&buf](std::string_view key, double value) {
    buf += key;
    buf.push_back('=');
    csv::append_number(buf, value);
    buf.push_back('\n');
  };
  emit("powerlaw_slope", fit.powerlaw_slope);
  emit("head_r2", fit.head_r2);
  emit("exp_rate", fit.exp_rate);
  emit("tail_r2", fit.tail_r2);
  emit("split_value", fit.split_value);
  buf += "head_points=";
  csv::append_number(buf, static_cast<std::int64_t>(fit.head_points));
  buf += "\ntail_points=";
  csv::append_number(buf, static_cast<std::int64_t>(fit.tail_points));
  buf += "\nsamples=";
  csv::append_number(buf, static_cast<std::int64_t>(fit.samples));
  buf.push_back('\n');
  out << buf;
}

}  // namespace dtn
