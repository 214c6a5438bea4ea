#include "dtnkit/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "dtnkit/csv.hpp"

namespace dtn {

namespace detail {

Exit compute_exit(const Rect& r, Vec2 p, Vec2 d) {
  Exit exit;
  double best = std::numeric_limits<double>::infinity();
  int wall = -1;
  if (d.x > 0) {
    const double s = (r.x1 - p.x) / d.x;
    if (s < best) best = s, wall = 1;
  } else if (d.x < 0) {
    const double s = (r.x0 - p.x) / d.x;
    if (s < best) best = s, wall = 0;
  }
  if (d.y > 0) {
    const double s = (r.y1 - p.y) / d.y;
    if (s < best) best = s, wall = 3;
  } else if (d.y < 0) {
    const double s = (r.y0 - p.y) / d.y;
    if (s < best) best = s, wall = 2;
  }
  if (wall < 0 || !(best > 0) || !std::isfinite(best)) return exit;
  Vec2 q{p.x + d.x * best, p.y + d.y * best};
  switch (wall) {  // snap onto the wall, clamp the free coordinate
    case 0: q.x = r.x0; break;
    case 1: q.x = r.x1; break;
    case 2: q.y = r.y0; break;
    case 3: q.y = r.y1; break;
  }
  q.x = std::clamp(q.x, r.x0, r.x1);
  q.y = std::clamp(q.y, r.y0, r.y1);
  exit.distance = best;
  exit.point = q;
  exit.wall = wall;
  return exit;
}

}  // namespace detail

namespace {

constexpr double kEps = 1e-9;

Rect arena_rect(const Arena& arena) { return {0.0, 0.0, arena.width, arena.height}; }

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

using detail::Exit;
using detail::compute_exit;

// Random-direction walk confined to a rectangle.  Movement only advances
// while the walk is driven through advance(); freezing a node is simply not
// calling it for the frozen span.
struct Walker {
  Rect bounds;
  Vec2 pos;
  enum class Phase { Moving, Transit, Paused } phase = Phase::Paused;
  Vec2 dir{1.0, 0.0};
  double speed = 1.0;
  double travel_left = 0.0;  // seconds until the current leg ends
  Vec2 target;
  int hit_wall = -1;  // wall the current/most recent leg ends on
  double pause_left = 0.0;
  double speed_min = 1.0, speed_max = 1.0;
  double pause_min = 0.0, pause_max = 0.0;
};

// A fresh straight leg to the region boundary.  Interior starts draw the
// direction uniformly; boundary restarts draw it cosine-weighted about the
// inward normal, which keeps the long-run occupancy of the rectangle flat
// (a uniform redraw over-fills the centre).
void start_leg(Walker& w, Rng& rng, bool from_boundary) {
  static constexpr double kNormal[4] = {0.0, std::numbers::pi, std::numbers::pi / 2,
                                        -std::numbers::pi / 2};
  for (int tries = 0; tries < 64; ++tries) {
    double angle;
    if (from_boundary && w.hit_wall >= 0) {
      const double beta = std::asin(2.0 * rng.canonical() - 1.0);
      angle = kNormal[w.hit_wall] + beta;
    } else {
      angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const Vec2 d{std::cos(angle), std::sin(angle)};
    const Exit exit = compute_exit(w.bounds, w.pos, d);
    if (exit.wall >= 0 && exit.distance > kEps) {
      w.dir = d;
      w.target = exit.point;
      w.hit_wall = exit.wall;
      w.speed = rng.uniform(w.speed_min, w.speed_max);
      w.travel_left = exit.distance / w.speed;
      w.phase = Walker::Phase::Moving;
      return;
    }
  }
  // Degenerate corner start: head for the centre.
  const Vec2 c{(w.bounds.x0 + w.bounds.x1) / 2, (w.bounds.y0 + w.bounds.y1) / 2};
  const double len = dist(w.pos, c);
  const Vec2 d = len > 0 ? Vec2{(c.x - w.pos.x) / len, (c.y - w.pos.y) / len}
                         : Vec2{1.0, 0.0};
  const Exit exit = compute_exit(w.bounds, w.pos, d);
  w.dir = d;
  w.target = exit.wall >= 0 ? exit.point : w.pos;
  w.hit_wall = exit.wall;
  w.speed = rng.uniform(w.speed_min, w.speed_max);
  w.travel_left = exit.wall >= 0 ? exit.distance / w.speed : 0.0;
  w.phase = Walker::Phase::Moving;
}

void complete_leg(Walker& w, Rng& rng) {
  if (w.phase == Walker::Phase::Transit) {
    start_leg(w, rng, /*from_boundary=*/false);
  } else {
    w.phase = Walker::Phase::Paused;
    w.pause_left = rng.uniform(w.pause_min, w.pause_max);
  }
}

void begin_transit(Walker& w, Rng& rng, const Rect& region) {
  w.bounds = region;
  const Vec2 dest{rng.uniform(region.x0, region.x1), rng.uniform(region.y0, region.y1)};
  const double len = dist(w.pos, dest);
  w.speed = rng.uniform(w.speed_min, w.speed_max);
  if (len <= kEps) {
    w.phase = Walker::Phase::Transit;  // already there; next advance starts a leg
    w.travel_left = 0.0;
    w.target = w.pos;
    w.dir = {1.0, 0.0};
    return;
  }
  w.dir = {(dest.x - w.pos.x) / len, (dest.y - w.pos.y) / len};
  w.target = dest;
  w.travel_left = len / w.speed;
  w.phase = Walker::Phase::Transit;
}

// Drive the walk through [from, to), appending segments.  Emitted segments
// chain exactly: each starts at the previous end time and position.
void advance(Walker& w, double from, double to, Rng& rng, std::vector<Segment>& segs) {
  double t = from;
  while (t < to) {
    if (w.phase == Walker::Phase::Paused) {
      if (w.pause_left <= kEps) {
        start_leg(w, rng, /*from_boundary=*/true);
        continue;
      }
      if (w.pause_left < to - t) {
        const double t1 = t + w.pause_left;
        if (t1 > t) segs.push_back({t, t1, w.pos, w.pos});
        w.pause_left = 0.0;
        t = t1;
      } else {
        segs.push_back({t, to, w.pos, w.pos});
        w.pause_left -= to - t;
        if (w.pause_left < kEps) w.pause_left = 0.0;
        t = to;
      }
    } else {
      if (w.travel_left <= kEps) {
        // Residue from a window-limited partial move: treat the current
        // position as the leg end so emitted segments keep chaining exactly.
        w.travel_left = 0.0;
        complete_leg(w, rng);
        continue;
      }
      const double room = to - t;
      if (w.travel_left <= room) {
        const double t1 = w.travel_left == room ? to : t + w.travel_left;
        if (t1 > t) segs.push_back({t, t1, w.pos, w.target});
        w.pos = w.target;
        w.travel_left = 0.0;
        t = t1;
        complete_leg(w, rng);
      } else {
        const double frac = room / w.travel_left;
        const Vec2 end{w.pos.x + (w.target.x - w.pos.x) * frac,
                       w.pos.y + (w.target.y - w.pos.y) * frac};
        segs.push_back({t, to, w.pos, end});
        w.pos = end;
        w.travel_left -= room;
        t = to;
      }
    }
  }
}

void coalesce_windows(std::vector<std::pair<double, double>>& windows) {
  std::vector<std::pair<double, double>> merged;
  for (const auto& win : windows) {
    if (win.second <= win.first) continue;
    if (!merged.empty() && win.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, win.second);
    else
      merged.push_back(win);
  }
  windows = std::move(merged);
}

NodeTrack synth_rd_node(const RdConfig& c, Rng rng) {
  NodeTrack track;
  Walker w;
  w.bounds = arena_rect(c.arena);
  w.speed_min = c.speed_min;
  w.speed_max = c.speed_max;
  w.pause_min = c.pause_min;
  w.pause_max = c.pause_max;
  w.pos = {rng.uniform(0.0, c.arena.width), rng.uniform(0.0, c.arena.height)};
  track.initial = w.pos;
  start_leg(w, rng, /*from_boundary=*/false);
  if (c.duration <= 0) return track;

  if (!c.onoff) {
    track.online.push_back({0.0, c.duration});
    advance(w, 0.0, c.duration, rng, track.segments);
  } else {
    double t = 0.0;
    bool on = true;
    while (t < c.duration) {
      const double len = on ? rng.uniform(c.onoff->on_min, c.onoff->on_max)
                            : rng.uniform(c.onoff->off_min, c.onoff->off_max);
      const double end = std::min(t + len, c.duration);
      if (end > t) {
        if (on) {
          track.online.push_back({t, end});
          advance(w, t, end, rng, track.segments);
        } else {
          track.segments.push_back({t, end, w.pos, w.pos});
        }
        t = end;
      }
      on = !on;
    }
    coalesce_windows(track.online);
  }
  return track;
}

NodeTrack synth_tvc_node(const TvcConfig& c, std::size_t group, Rng rng) {
  const std::size_t n_comms = c.communities.size();
  auto region_of = [&](std::size_t target) -> Rect {
    return target < n_comms ? c.communities[target].bounds : arena_rect(c.arena);
  };

  NodeTrack track;
  Walker w;
  w.speed_min = c.speed_min;
  w.speed_max = c.speed_max;
  w.pause_min = c.pause_min;
  w.pause_max = c.pause_max;

  std::size_t target = rng.weighted(c.probs[group][0]);
  Rect region = region_of(target);
  w.bounds = region;
  w.pos = {rng.uniform(region.x0, region.x1), rng.uniform(region.y0, region.y1)};
  track.initial = w.pos;
  start_leg(w, rng, /*from_boundary=*/false);

  std::size_t last_target = target;
  bool pending_first = true;
  const std::size_t n_periods = c.schedule.periods.size();

  for (std::size_t k = 0;; ++k) {
    const std::size_t p = k % n_periods;
    const double cycle_base = static_cast<double>(k / n_periods) * c.schedule.cycle;
    const double occ_start = cycle_base + c.schedule.periods[p].offset;
    if (occ_start >= c.duration) break;
    const double occ_end =
        std::min(occ_start + c.schedule.periods[p].length, c.duration);

    if (!rng.bernoulli(c.online_prob[p])) {
      if (occ_end > occ_start)
        track.segments.push_back({occ_start, occ_end, w.pos, w.pos});
      continue;
    }
    track.online.push_back({occ_start, occ_end});

    double tt = occ_start;
    while (tt < occ_end) {
      const std::size_t tgt =
          pending_first ? last_target : rng.weighted(c.probs[group][p]);
      pending_first = false;
      const double len = rng.uniform(c.epoch_min, c.epoch_max);
      const double epoch_end = len < occ_end - tt ? tt + len : occ_end;
      if (tgt != last_target) {
        region = region_of(tgt);
        if (region.contains(w.pos)) {
          w.bounds = region;
          start_leg(w, rng, /*from_boundary=*/false);
        } else {
          begin_transit(w, rng, region);
        }
        last_target = tgt;
      }
      if (epoch_end > tt) advance(w, tt, epoch_end, rng, track.segments);
      tt = epoch_end;
    }
  }
  coalesce_windows(track.online);
  return track;
}

std::size_t group_of(const TvcConfig& c, std::size_t node) {
  std::size_t base = 0;
  for (std::size_t g = 0; g < c.groups.size(); ++g) {
    base += c.groups[g].count;
    if (node < base) return g;
  }
  return c.groups.size() - 1;
}

// Parameters in (0,1) where the straight segment crosses value v on one axis.
void add_crossing(std::vector<double>& out, double from, double to, double v) {
  if (from == to) return;
  const double s = (v - from) / (to - from);
  if (s > 0.0 && s < 1.0) out.push_back(s);
}

}  // namespace

void validate(const RdConfig& c) {
  if (!(c.arena.width > 0)) throw ConfigError("arena.width", "must be > 0");
  if (!(c.arena.height > 0)) throw ConfigError("arena.height", "must be > 0");
  if (c.n_nodes == 0) throw ConfigError("nodes", "must be >= 1");
  if (!(c.duration >= 0)) throw ConfigError("duration", "must be >= 0");
  if (!(c.duration <= 1e9)) throw ConfigError("duration", "must be <= 1e9 seconds");
  if (!(c.speed_min > 0)) throw ConfigError("speed.min", "must be > 0");
  if (!(c.speed_max >= c.speed_min)) throw ConfigError("speed.max", "must be >= speed.min");
  if (!(c.pause_min >= 0)) throw ConfigError("pause.min", "must be >= 0");
  if (!(c.pause_max >= c.pause_min)) throw ConfigError("pause.max", "must be >= pause.min");
  if (c.onoff) {
    if (!(c.onoff->on_min >= 0)) throw ConfigError("onoff.on.min", "must be >= 0");
    if (!(c.onoff->on_max >= c.onoff->on_min))
      throw ConfigError("onoff.on.max", "must be >= onoff.on.min");
    if (!(c.onoff->on_max > 0)) throw ConfigError("onoff.on.max", "must be > 0");
    if (!(c.onoff->off_min >= 0)) throw ConfigError("onoff.off.min", "must be >= 0");
    if (!(c.onoff->off_max >= c.onoff->off_min))
      throw ConfigError("onoff.off.max", "must be >= onoff.off.min");
    if (!(c.onoff->off_max > 0)) throw ConfigError("onoff.off.max", "must be > 0");
  }
}

void validate(const TvcConfig& c) {
  if (!(c.arena.width > 0)) throw ConfigError("arena.width", "must be > 0");
  if (!(c.arena.height > 0)) throw ConfigError("arena.height", "must be > 0");
  if (c.n_nodes == 0) throw ConfigError("nodes", "must be >= 1");
  if (!(c.duration >= 0)) throw ConfigError("duration", "must be >= 0");
  if (!(c.duration <= 1e9)) throw ConfigError("duration", "must be <= 1e9 seconds");
  if (!(c.speed_min > 0)) throw ConfigError("speed.min", "must be > 0");
  if (!(c.speed_max >= c.speed_min)) throw ConfigError("speed.max", "must be >= speed.min");
  if (!(c.pause_min >= 0)) throw ConfigError("pause.min", "must be >= 0");
  if (!(c.pause_max >= c.pause_min)) throw ConfigError("pause.max", "must be >= pause.min");
  if (!(c.epoch_min > 0)) throw ConfigError("epoch.min", "must be > 0");
  if (!(c.epoch_max >= c.epoch_min)) throw ConfigError("epoch.max", "must be >= epoch.min");
  if (!(c.schedule.cycle > 0)) throw ConfigError("cycle", "must be > 0");
  if (c.schedule.periods.empty()) throw ConfigError("period", "at least one required");
  double cursor = 0.0;
  std::set<std::string> period_labels;
  for (const TimePeriod& p : c.schedule.periods) {
    if (p.label.empty()) throw ConfigError("period", "label must be non-empty");
    if (!period_labels.insert(p.label).second)
      throw ConfigError("period", "duplicate label '" + p.label + "'");
    if (!(p.length > 0))
      throw ConfigError("period", "'" + p.label + "': length must be > 0");
    if (std::abs(p.offset - cursor) > 1e-9)
      throw ConfigError("period",
                        "'" + p.label + "': periods must tile the cycle contiguously");
    cursor = p.offset + p.length;
  }
  if (std::abs(cursor - c.schedule.cycle) > 1e-9)
    throw ConfigError("period", "periods must cover the full cycle");

  std::set<std::string> comm_ids;
  for (const Community& comm : c.communities) {
    if (comm.id.empty()) throw ConfigError("community", "id must be non-empty");
    if (!comm_ids.insert(comm.id).second)
      throw ConfigError("community", "duplicate id '" + comm.id + "'");
    const Rect& b = comm.bounds;
    if (!(b.x0 < b.x1 && b.y0 < b.y1))
      throw ConfigError("community", "'" + comm.id + "': bounds are degenerate");
    if (b.x0 < 0 || b.y0 < 0 || b.x1 > c.arena.width || b.y1 > c.arena.height)
      throw ConfigError("community", "'" + comm.id + "': bounds exceed the arena");
  }

  if (c.groups.empty()) throw ConfigError("group", "at least one required");
  std::set<std::string> group_names;
  std::size_t total = 0;
  for (const NodeGroup& g : c.groups) {
    if (g.name.empty()) throw ConfigError("group", "name must be non-empty");
    if (!group_names.insert(g.name).second)
      throw ConfigError("group", "duplicate name '" + g.name + "'");
    total += g.count;
  }
  if (total != c.n_nodes)
    throw ConfigError("group", "group counts sum to " + std::to_string(total) +
                                   ", expected nodes=" + std::to_string(c.n_nodes));

  if (c.probs.size() != c.groups.size())
    throw ConfigError("prefs", "need one block per group");
  for (std::size_t g = 0; g < c.probs.size(); ++g) {
    if (c.probs[g].size() != c.schedule.periods.size())
      throw ConfigError("prefs", "group '" + c.groups[g].name +
                                     "': need one row per period");
    for (std::size_t p = 0; p < c.probs[g].size(); ++p) {
      const auto& row = c.probs[g][p];
      if (row.size() != c.communities.size() + 1)
        throw ConfigError("prefs",
                          "group '" + c.groups[g].name + "', period '" +
                              c.schedule.periods[p].label + "': need " +
                              std::to_string(c.communities.size() + 1) +
                              " probabilities (communities plus roam)");
      double sum = 0.0;
      for (double v : row) {
        if (v < 0) throw ConfigError("prefs", "probabilities must be >= 0");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("prefs", "group '" + c.groups[g].name + "', period '" +
                                       c.schedule.periods[p].label +
                                       "': probabilities must sum to 1");
    }
  }
  if (c.online_prob.size() != c.schedule.periods.size())
    throw ConfigError("online", "need one probability per period");
  for (double p : c.online_prob)
    if (p < 0 || p > 1) throw ConfigError("online", "probability must lie in [0,1]");
}

MovementTrace synthesize_rd(const RdConfig& config) {
  validate(config);
  MovementTrace trace;
  trace.arena = config.arena;
  trace.duration = config.duration;
  trace.tracks.resize(config.n_nodes);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(config.n_nodes); ++i)
    trace.tracks[static_cast<std::size_t>(i)] = synth_rd_node(
        config, Rng::substream(config.seed, static_cast<std::uint64_t>(i)));
  return trace;
}

MovementTrace synthesize_tvc(const TvcConfig& config) {
  validate(config);
  MovementTrace trace;
  trace.arena = config.arena;
  trace.duration = config.duration;
  trace.tracks.resize(config.n_nodes);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(config.n_nodes); ++i)
    trace.tracks[static_cast<std::size_t>(i)] =
        synth_tvc_node(config, group_of(config, static_cast<std::size_t>(i)),
                       Rng::substream(config.seed, static_cast<std::uint64_t>(i)));
  return trace;
}

Vec2 position_at(const NodeTrack& track, double t) {
  if (track.segments.empty()) return track.initial;
  auto it = std::upper_bound(track.segments.begin(), track.segments.end(), t,
                             [](double v, const Segment& s) { return v < s.t0; });
  if (it == track.segments.begin()) return track.segments.front().p0;
  const Segment& s = *(it - 1);
  if (t >= s.t1) return s.p1;
  if (t <= s.t0) return s.p0;
  const double frac = (t - s.t0) / (s.t1 - s.t0);
  return {s.p0.x + (s.p1.x - s.p0.x) * frac, s.p0.y + (s.p1.y - s.p0.y) * frac};
}

bool online_at(const NodeTrack& track, double t) {
  auto it = std::upper_bound(
      track.online.begin(), track.online.end(), t,
      [](double v, const std::pair<double, double>& w) { return v < w.first; });
  if (it == track.online.begin()) return false;
  return t < (it - 1)->second;
}

namespace {

std::int64_t sample_count(double duration, std::int64_t step) {
  if (duration <= 0) return 0;
  return static_cast<std::int64_t>(std::ceil(duration / static_cast<double>(step)));
}

void check_proximity_args(double radio_range, std::int64_t sample_step) {
  if (!(radio_range > 0)) throw ConfigError("range", "must be > 0");
  if (sample_step < 1) throw ConfigError("step", "must be >= 1");
}

}  // namespace

ContactTrace movement_to_contacts(const MovementTrace& trace, double radio_range,
                                  std::int64_t sample_step) {
  check_proximity_args(radio_range, sample_step);
  const std::size_t n = trace.tracks.size();
  std::set<NodeId> all_nodes;
  for (std::size_t i = 0; i < n; ++i) all_nodes.insert(static_cast<NodeId>(i));
  const std::int64_t samples = sample_count(trace.duration, sample_step);
  if (n < 2 || samples == 0) return canonicalize_contacts({}, std::move(all_nodes));

  const std::size_t n_pairs = n * (n - 1) / 2;
  std::vector<std::uint32_t> pair_a(n_pairs), pair_b(n_pairs);
  {
    std::size_t p = 0;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j, ++p) pair_a[p] = i, pair_b[p] = j;
  }

  const double r2 = radio_range * radio_range;
  constexpr std::int64_t kBlock = 2048;
  std::vector<double> px(n * kBlock), py(n * kBlock);
  std::vector<unsigned char> on(n * kBlock);
  std::vector<std::size_t> seg_cursor(n, 0), win_cursor(n, 0);
  std::vector<std::int64_t> run_start(n_pairs, -1);
  std::vector<std::vector<TimeInterval>> runs(n_pairs);

  for (std::int64_t base = 0; base < samples; base += kBlock) {
    const std::int64_t count = std::min(kBlock, samples - base);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t node = 0; node < static_cast<std::ptrdiff_t>(n); ++node) {
      const NodeTrack& track = trace.tracks[static_cast<std::size_t>(node)];
      std::size_t& sc = seg_cursor[static_cast<std::size_t>(node)];
      std::size_t& wc = win_cursor[static_cast<std::size_t>(node)];
      double* x = px.data() + static_cast<std::size_t>(node) * kBlock;
      double* y = py.data() + static_cast<std::size_t>(node) * kBlock;
      unsigned char* o = on.data() + static_cast<std::size_t>(node) * kBlock;
      for (std::int64_t k = 0; k < count; ++k) {
        const double t = static_cast<double>((base + k) * sample_step);
        Vec2 pos = track.initial;
        if (!track.segments.empty()) {
          while (sc + 1 < track.segments.size() && track.segments[sc].t1 < t) ++sc;
          const Segment& s = track.segments[sc];
          if (t >= s.t1) {
            pos = s.p1;
          } else if (t <= s.t0) {
            pos = s.p0;
          } else {
            const double frac = (t - s.t0) / (s.t1 - s.t0);
            pos = {s.p0.x + (s.p1.x - s.p0.x) * frac,
                   s.p0.y + (s.p1.y - s.p0.y) * frac};
          }
        }
        x[k] = pos.x;
        y[k] = pos.y;
        while (wc < track.online.size() && track.online[wc].second <= t) ++wc;
        o[k] = wc < track.online.size() && t >= track.online[wc].first ? 1 : 0;
      }
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_pairs); ++p) {
      const std::size_t i = pair_a[static_cast<std::size_t>(p)];
      const std::size_t j = pair_b[static_cast<std::size_t>(p)];
      const double* xi = px.data() + i * kBlock;
      const double* yi = py.data() + i * kBlock;
      const double* xj = px.data() + j * kBlock;
      const double* yj = py.data() + j * kBlock;
      const unsigned char* oi = on.data() + i * kBlock;
      const unsigned char* oj = on.data() + j * kBlock;
      std::int64_t& state = run_start[static_cast<std::size_t>(p)];
      for (std::int64_t k = 0; k < count; ++k) {
        const double dx = xi[k] - xj[k];
        const double dy = yi[k] - yj[k];
        const bool in = oi[k] && oj[k] && dx * dx + dy * dy <= r2;
        const std::int64_t t = (base + k) * sample_step;
        if (in) {
          if (state < 0) state = t;
        } else if (state >= 0) {
          runs[static_cast<std::size_t>(p)].push_back({state, t});
          state = -1;
        }
      }
    }
  }

  std::vector<EncounterRecord> records;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    if (run_start[p] >= 0) runs[p].push_back({run_start[p], samples * sample_step});
    for (const TimeInterval& iv : runs[p])
      records.push_back({static_cast<NodeId>(pair_a[p]), static_cast<NodeId>(pair_b[p]), iv});
  }
  return canonicalize_contacts(std::move(records), std::move(all_nodes));
}

ContactTrace movement_to_contacts_serial(const MovementTrace& trace, double radio_range,
                                         std::int64_t sample_step) {
  check_proximity_args(radio_range, sample_step);
  const std::size_t n = trace.tracks.size();
  std::set<NodeId> all_nodes;
  for (std::size_t i = 0; i < n; ++i) all_nodes.insert(static_cast<NodeId>(i));
  const std::int64_t samples = sample_count(trace.duration, sample_step);

  std::vector<EncounterRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::int64_t state = -1;
      for (std::int64_t k = 0; k < samples; ++k) {
        const std::int64_t t = k * sample_step;
        const double td = static_cast<double>(t);
        bool in = false;
        if (online_at(trace.tracks[i], td) && online_at(trace.tracks[j], td)) {
          const Vec2 pi = position_at(trace.tracks[i], td);
          const Vec2 pj = position_at(trace.tracks[j], td);
          const double dx = pi.x - pj.x, dy = pi.y - pj.y;
          in = dx * dx + dy * dy <= radio_range * radio_range;
        }
        if (in) {
          if (state < 0) state = t;
        } else if (state >= 0) {
          records.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), {state, t}});
          state = -1;
        }
      }
      if (state >= 0)
        records.push_back(
            {static_cast<NodeId>(i), static_cast<NodeId>(j), {state, samples * sample_step}});
    }
  }
  return canonicalize_contacts(std::move(records), std::move(all_nodes));
}

namespace {

// Split one segment at every community edge line and hand each piece (with its
// absolute time bounds) to the sink, labelled with the first containing
// community or none.
template <typename Sink>
void split_by_communities(const Segment& seg, const std::vector<Community>& communities,
                          Sink&& sink) {
  std::vector<double> cuts;
  for (const Community& c : communities) {
    add_crossing(cuts, seg.p0.x, seg.p1.x, c.bounds.x0);
    add_crossing(cuts, seg.p0.x, seg.p1.x, c.bounds.x1);
    add_crossing(cuts, seg.p0.y, seg.p1.y, c.bounds.y0);
    add_crossing(cuts, seg.p0.y, seg.p1.y, c.bounds.y1);
  }
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  const double span = seg.t1 - seg.t0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double s0 = cuts[k], s1 = cuts[k + 1];
    if (s1 <= s0) continue;
    const double mid = (s0 + s1) / 2;
    const Vec2 point{seg.p0.x + (seg.p1.x - seg.p0.x) * mid,
                     seg.p0.y + (seg.p1.y - seg.p0.y) * mid};
    const Community* owner = nullptr;
    for (const Community& c : communities) {
      if (c.bounds.contains(point)) {
        owner = &c;
        break;
      }
    }
    sink(owner, seg.t0 + span * s0, seg.t0 + span * s1);
  }
}

// Visit the online part of every segment of one track.
template <typename Fn>
void for_each_online_piece(const NodeTrack& track, Fn&& fn) {
  std::size_t wc = 0;
  for (const Segment& seg : track.segments) {
    while (wc < track.online.size() && track.online[wc].second <= seg.t0) ++wc;
    for (std::size_t w = wc; w < track.online.size(); ++w) {
      const double a = std::max(seg.t0, track.online[w].first);
      const double b = std::min(seg.t1, track.online[w].second);
      if (track.online[w].first >= seg.t1) break;
      if (b <= a) continue;
      if (a == seg.t0 && b == seg.t1) {
        fn(seg);
      } else {
        const double span = seg.t1 - seg.t0;
        const double s0 = (a - seg.t0) / span, s1 = (b - seg.t0) / span;
        const Vec2 pa{seg.p0.x + (seg.p1.x - seg.p0.x) * s0,
                      seg.p0.y + (seg.p1.y - seg.p0.y) * s0};
        const Vec2 pb{seg.p0.x + (seg.p1.x - seg.p0.x) * s1,
                      seg.p0.y + (seg.p1.y - seg.p0.y) * s1};
        fn(Segment{a, b, pa, pb});
      }
    }
  }
}

}  // namespace

std::vector<std::map<LocationId, double>> trace_location_occupancy(
    const MovementTrace& trace, const std::vector<Community>& communities) {
  std::vector<std::map<LocationId, double>> out(trace.tracks.size());
  for (std::size_t node = 0; node < trace.tracks.size(); ++node) {
    double online_total = 0.0;
    std::map<LocationId, double> seconds;
    for_each_online_piece(trace.tracks[node], [&](const Segment& piece) {
      online_total += piece.t1 - piece.t0;
      split_by_communities(piece, communities,
                           [&](const Community* owner, double a, double b) {
                             if (owner) seconds[owner->id] += b - a;
                           });
    });
    if (online_total <= 0) continue;
    for (auto& [id, secs] : seconds) out[node][id] = secs / online_total;
  }
  return out;
}

std::vector<SessionRecord> movement_to_sessions(const MovementTrace& trace,
                                                const std::vector<Community>& communities) {
  std::vector<SessionRecord> sessions;
  for (std::size_t node = 0; node < trace.tracks.size(); ++node) {
    std::map<LocationId, std::vector<TimeInterval>> per_loc;
    for_each_online_piece(trace.tracks[node], [&](const Segment& piece) {
      split_by_communities(piece, communities,
                           [&](const Community* owner, double a, double b) {
                             if (!owner) return;
                             const std::int64_t start =
                                 static_cast<std::int64_t>(std::floor(a));
                             const std::int64_t end =
                                 static_cast<std::int64_t>(std::ceil(b));
                             if (end > start) per_loc[owner->id].push_back({start, end});
                           });
    });
    for (auto& [loc, intervals] : per_loc)
      for (const TimeInterval& iv : merge_intervals(std::move(intervals)))
        sessions.push_back({static_cast<NodeId>(node), loc, iv});
  }
  return sessions;
}

std::vector<double> grid_occupancy(const MovementTrace& trace, int nx, int ny) {
  if (nx < 1) throw ConfigError("grid", "nx must be >= 1");
  if (ny < 1) throw ConfigError("grid", "ny must be >= 1");
  const double cw = trace.arena.width / nx;
  const double ch = trace.arena.height / ny;
  std::vector<double> cells(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny),
                            0.0);
  auto cell_index = [&](Vec2 p) {
    const int ix = std::clamp(static_cast<int>(p.x / cw), 0, nx - 1);
    const int iy = std::clamp(static_cast<int>(p.y / ch), 0, ny - 1);
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  };
  std::vector<double> cuts;
  for (const NodeTrack& track : trace.tracks) {
    for (const Segment& seg : track.segments) {
      if (seg.p0.x == seg.p1.x && seg.p0.y == seg.p1.y) {
        cells[cell_index(seg.p0)] += seg.t1 - seg.t0;
        continue;
      }
      cuts.clear();
      for (int i = 1; i < nx; ++i) add_crossing(cuts, seg.p0.x, seg.p1.x, i * cw);
      for (int j = 1; j < ny; ++j) add_crossing(cuts, seg.p0.y, seg.p1.y, j * ch);
      cuts.push_back(0.0);
      cuts.push_back(1.0);
      std::sort(cuts.begin(), cuts.end());
      const double span = seg.t1 - seg.t0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double s0 = cuts[k], s1 = cuts[k + 1];
        if (s1 <= s0) continue;
        const double mid = (s0 + s1) / 2;
        const Vec2 point{seg.p0.x + (seg.p1.x - seg.p0.x) * mid,
                         seg.p0.y + (seg.p1.y - seg.p0.y) * mid};
        cells[cell_index(point)] += span * (s1 - s0);
      }
    }
  }
  return cells;
}

void write_movement(const MovementTrace& trace, std::ostream& out) {
  std::string buf("node,t0,x0,y0,t1,x1,y1,online\n");
  for (std::size_t node = 0; node < trace.tracks.size(); ++node) {
    const NodeTrack& track = trace.tracks[node];
    std::size_t wc = 0;
    for (const Segment& seg : track.segments) {
      const double mid = (seg.t0 + seg.t1) / 2;
      while (wc < track.online.size() && track.online[wc].second <= mid) ++wc;
      const bool online = wc < track.online.size() && mid >= track.online[wc].first;
      csv::append_number(buf, static_cast<std::int64_t>(node));
      buf.push_back(',');
      csv::append_number(buf, seg.t0);
      buf.push_back(',');
      csv::append_number(buf, seg.p0.x);
      buf.push_back(',');
      csv::append_number(buf, seg.p0.y);
      buf.push_back(',');
      csv::append_number(buf, seg.t1);
      buf.push_back(',');
      csv::append_number(buf, seg.p1.x);
      buf.push_back(',');
      csv::append_number(buf, seg.p1.y);
      buf.push_back(',');
      buf.push_back(online ? '1' : '0');
      buf.push_back('\n');
    }
  }
  out << buf;
}

MovementTrace parse_movement(std::istream& in, const std::string& source) {
  csv::RowReader reader(in, source, "node,t0,x0,y0,t1,x1,y1,online");
  std::vector<std::string_view> fields;
  struct Row {
    Segment seg;
    bool online;
  };
  std::map<NodeId, std::vector<Row>> per_node;
  NodeId max_node = -1;
  while (reader.next(fields)) {
    const std::int64_t node = csv::parse_int(fields[0], reader, "node");
    if (node < 0) reader.fail("field 'node': must be >= 0");
    Row row;
    row.seg.t0 = csv::parse_double(fields[1], reader, "t0");
    row.seg.p0.x = csv::parse_double(fields[2], reader, "x0");
    row.seg.p0.y = csv::parse_double(fields[3], reader, "y0");
    row.seg.t1 = csv::parse_double(fields[4], reader, "t1");
    row.seg.p1.x = csv::parse_double(fields[5], reader, "x1");
    row.seg.p1.y = csv::parse_double(fields[6], reader, "y1");
    const std::int64_t online = csv::parse_int(fields[7], reader, "online");
    if (online != 0 && online != 1) reader.fail("field 'online': must be 0 or 1");
    row.online = online == 1;
    if (!(row.seg.t0 < row.seg.t1)) reader.fail("segment with non-positive duration");
    per_node[node].push_back(row);
    max_node = std::max(max_node, node);
  }

  MovementTrace trace;
  if (max_node < 0) return trace;
  trace.tracks.resize(static_cast<std::size_t>(max_node) + 1);
  double max_x = 0.0, max_y = 0.0;
  for (auto& [node, rows] : per_node) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.seg.t0 < b.seg.t0; });
    NodeTrack& track = trace.tracks[static_cast<std::size_t>(node)];
    track.initial = rows.front().seg.p0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Segment& seg = rows[k].seg;
      if (k > 0) {
        const Segment& prev = rows[k - 1].seg;
        if (seg.t0 != prev.t1 || seg.p0.x != prev.p1.x || seg.p0.y != prev.p1.y)
          throw ValidationError("node " + std::to_string(node) +
                                ": segments are not contiguous at t=" +
                                csv::format_number(seg.t0));
      }
      track.segments.push_back(seg);
      if (rows[k].online) track.online.push_back({seg.t0, seg.t1});
      max_x = std::max({max_x, seg.p0.x, seg.p1.x});
      max_y = std::max({max_y, seg.p0.y, seg.p1.y});
      trace.duration = std::max(trace.duration, seg.t1);
    }
    coalesce_windows(track.online);
  }
  trace.arena = {max_x, max_y};
  return trace;
}

}  // namespace dtn
