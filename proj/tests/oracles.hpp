#pragma once

// Brute-force reference implementations used to cross-check the library.
// These deliberately favour the most literal formulation over speed: integer
// timelines are walked second by second, graphs are relaxed with a priority
// queue, positions are interpolated with linear scans.  Keep them dumb.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "dtnkit/core.hpp"
#include "dtnkit/mobility.hpp"

namespace oracle {

using dtn::ContactTrace;
using dtn::EncounterRecord;
using dtn::MovementTrace;
using dtn::NodeId;
using dtn::SessionRecord;
using dtn::TimeInterval;

// Number of integer seconds covered by the union of intervals.
inline std::int64_t union_measure(const std::vector<TimeInterval>& intervals) {
  std::set<std::int64_t> covered;
  for (const auto& iv : intervals)
    for (std::int64_t t = iv.start; t < iv.end; ++t) covered.insert(t);
  return static_cast<std::int64_t>(covered.size());
}

// Second-by-second co-presence: two nodes are in contact during [t, t+1) iff
// some location hosts both.  Maximal runs of in-contact seconds become
// encounters.  Only usable for small time spans.
inline ContactTrace encounters(const std::vector<SessionRecord>& sessions) {
  std::set<NodeId> nodes;
  std::int64_t lo = 0, hi = 0;
  bool any = false;
  for (const auto& s : sessions) {
    nodes.insert(s.node);
    if (!any) {
      lo = s.interval.start;
      hi = s.interval.end;
      any = true;
    } else {
      lo = std::min(lo, s.interval.start);
      hi = std::max(hi, s.interval.end);
    }
  }
  auto present = [&](NodeId n, const std::string& loc, std::int64_t t) {
    for (const auto& s : sessions)
      if (s.node == n && s.location == loc && s.interval.start <= t && t < s.interval.end)
        return true;
    return false;
  };
  std::set<std::string> locations;
  for (const auto& s : sessions) locations.insert(s.location);

  std::vector<EncounterRecord> records;
  for (auto a = nodes.begin(); a != nodes.end(); ++a) {
    for (auto b = std::next(a); b != nodes.end(); ++b) {
      std::int64_t run = -1;
      for (std::int64_t t = lo; t <= hi; ++t) {
        bool together = false;
        if (t < hi)
          for (const auto& loc : locations)
            if (present(*a, loc, t) && present(*b, loc, t)) {
              together = true;
              break;
            }
        if (together) {
          if (run < 0) run = t;
        } else if (run >= 0) {
          records.push_back({*a, *b, {run, t}});
          run = -1;
        }
      }
    }
  }
  return dtn::canonicalize_contacts(std::move(records), std::move(nodes));
}

// Literal position lookup: linear scan for the segment containing t.
inline dtn::Vec2 position(const dtn::NodeTrack& track, double t) {
  if (track.segments.empty()) return track.initial;
  for (const auto& seg : track.segments) {
    if (t >= seg.t0 && t <= seg.t1) {
      if (seg.t1 <= seg.t0) return seg.p0;
      const double a = (t - seg.t0) / (seg.t1 - seg.t0);
      return {seg.p0.x + (seg.p1.x - seg.p0.x) * a, seg.p0.y + (seg.p1.y - seg.p0.y) * a};
    }
  }
  return t < track.segments.front().t0 ? track.segments.front().p0
                                       : track.segments.back().p1;
}

inline bool online(const dtn::NodeTrack& track, double t) {
  for (const auto& [s, e] : track.online)
    if (s <= t && t < e) return true;
  return false;
}

// Per-sample proximity detection, one pair at a time.
inline ContactTrace contacts(const MovementTrace& trace, double range, std::int64_t step) {
  const std::int64_t samples =
      trace.duration > 0 ? (trace.duration + step - 1) / step : 0;
  std::set<NodeId> nodes;
  for (std::size_t i = 0; i < trace.tracks.size(); ++i)
    nodes.insert(static_cast<NodeId>(i));

  std::vector<EncounterRecord> records;
  for (std::size_t i = 0; i < trace.tracks.size(); ++i) {
    for (std::size_t j = i + 1; j < trace.tracks.size(); ++j) {
      std::int64_t run = -1;
      for (std::int64_t k = 0; k <= samples; ++k) {
        bool in = false;
        if (k < samples) {
          const double t = static_cast<double>(k * step);
          if (online(trace.tracks[i], t) && online(trace.tracks[j], t)) {
            const dtn::Vec2 a = position(trace.tracks[i], t);
            const dtn::Vec2 b = position(trace.tracks[j], t);
            const double dx = a.x - b.x, dy = a.y - b.y;
            in = dx * dx + dy * dy <= range * range;
          }
        }
        if (in) {
          if (run < 0) run = k * step;
        } else if (run >= 0) {
          records.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), {run, k * step}});
          run = -1;
        }
      }
    }
  }
  return dtn::canonicalize_contacts(std::move(records), std::move(nodes));
}

// Earliest-arrival flooding as a lexicographic (time, hops) Dijkstra.  A copy
// held since time t crosses a contact iff the contact starts at or after t;
// the recipient holds it from the contact start with one more hop.
inline std::map<NodeId, std::pair<std::int64_t, int>> epidemic(const ContactTrace& trace,
                                                               NodeId src,
                                                               std::int64_t t_create) {
  std::map<NodeId, std::pair<std::int64_t, int>> best;
  using State = std::tuple<std::int64_t, int, NodeId>;
  std::priority_queue<State, std::vector<State>, std::greater<>> queue;
  best[src] = {t_create, 0};
  queue.emplace(t_create, 0, src);
  while (!queue.empty()) {
    const auto [t, h, v] = queue.top();
    queue.pop();
    const auto it = best.find(v);
    if (it == best.end() || it->second != std::pair{t, h}) continue;  // stale entry
    for (const auto& rec : trace.records) {
      NodeId u;
      if (rec.a == v)
        u = rec.b;
      else if (rec.b == v)
        u = rec.a;
      else
        continue;
      if (rec.interval.start < t) continue;
      const std::pair cand{rec.interval.start, h + 1};
      const auto bu = best.find(u);
      if (bu == best.end() || cand < bu->second) {
        best[u] = cand;
        queue.emplace(cand.first, cand.second, u);
      }
    }
  }
  best.erase(src);
  return best;
}

// --- randomized inputs ------------------------------------------------------

inline ContactTrace random_contact_trace(std::mt19937_64& gen, int max_nodes = 10,
                                         int max_contacts = 50) {
  std::uniform_int_distribution<int> nodes_d(2, max_nodes);
  const int n = nodes_d(gen);
  std::uniform_int_distribution<int> count_d(0, max_contacts);
  const int m = count_d(gen);
  // Starts drawn from a coarse lattice so equal-start groups actually occur.
  std::uniform_int_distribution<std::int64_t> start_d(0, 40);
  std::uniform_int_distribution<std::int64_t> len_d(1, 50);
  std::uniform_int_distribution<int> node_d(0, n - 1);

  std::vector<EncounterRecord> records;
  for (int k = 0; k < m; ++k) {
    int a = node_d(gen), b = node_d(gen);
    if (a == b) continue;
    const std::int64_t s = start_d(gen) * 5;
    records.push_back({a, b, {s, s + len_d(gen)}});
  }
  std::set<NodeId> all;
  for (int i = 0; i < n; ++i) all.insert(i);
  return dtn::canonicalize_contacts(std::move(records), std::move(all));
}

inline std::vector<SessionRecord> random_sessions(std::mt19937_64& gen, int max_nodes = 5,
                                                  int max_sessions = 20, int max_locs = 3) {
  std::uniform_int_distribution<int> nodes_d(1, max_nodes);
  std::uniform_int_distribution<int> count_d(0, max_sessions);
  const int n = nodes_d(gen);
  const int m = count_d(gen);
  std::uniform_int_distribution<int> node_d(0, n - 1);
  std::uniform_int_distribution<int> loc_d(1, max_locs);
  std::uniform_int_distribution<std::int64_t> start_d(0, 150);
  std::uniform_int_distribution<std::int64_t> len_d(1, 60);

  std::vector<SessionRecord> sessions;
  for (int k = 0; k < m; ++k) {
    const std::int64_t s = start_d(gen);
    sessions.push_back(
        {node_d(gen), "L" + std::to_string(loc_d(gen)), {s, s + len_d(gen)}});
  }
  return sessions;
}

}  // namespace oracle
