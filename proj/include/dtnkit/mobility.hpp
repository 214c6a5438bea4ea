#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtnkit/core.hpp"
#include "dtnkit/rng.hpp"

namespace dtn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Arena {
  double width = 0.0;
  double height = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool contains(Vec2 p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

// One constant-velocity leg (or pause when p0 == p1) in continuous time.
struct Segment {
  double t0 = 0.0, t1 = 0.0;
  Vec2 p0, p1;
};

struct NodeTrack {
  Vec2 initial;                                   // position at t = 0
  std::vector<Segment> segments;                  // contiguous over [0, duration]
  std::vector<std::pair<double, double>> online;  // merged online windows
};

struct MovementTrace {
  Arena arena;
  double duration = 0.0;
  std::vector<NodeTrack> tracks;  // node id = index
};

struct OnOff {
  double on_min = 0.0, on_max = 0.0;
  double off_min = 0.0, off_max = 0.0;
};

struct RdConfig {
  Arena arena;
  std::size_t n_nodes = 0;
  double duration = 0.0;
  double speed_min = 0.0, speed_max = 0.0;
  double pause_min = 0.0, pause_max = 0.0;
  std::optional<OnOff> onoff;
  std::uint64_t seed = 0;
};

struct Community {
  LocationId id;
  Rect bounds;
};

struct TimePeriod {
  std::string label;
  double offset = 0.0, length = 0.0;
};

struct TimePeriodSchedule {
  double cycle = 0.0;
  std::vector<TimePeriod> periods;  // sorted, exactly tiling [0, cycle)
};

struct NodeGroup {
  std::string name;
  std::size_t count = 0;
};

struct TvcConfig {
  Arena arena;
  std::size_t n_nodes = 0;
  double duration = 0.0;
  TimePeriodSchedule schedule;
  std::vector<Community> communities;
  std::vector<NodeGroup> groups;
  // probs[group][period]: one weight per community plus a final roam weight.
  std::vector<std::vector<std::vector<double>>> probs;
  double epoch_min = 0.0, epoch_max = 0.0;
  double speed_min = 0.0, speed_max = 0.0;
  double pause_min = 0.0, pause_max = 0.0;
  std::vector<double> online_prob;  // per period
  std::uint64_t seed = 0;
};

void validate(const RdConfig& config);
void validate(const TvcConfig& config);

// Structured key=value model configuration files (see README for the keys).
RdConfig parse_rd_config(std::istream& in, const std::string& source);
TvcConfig parse_tvc_config(std::istream& in, const std::string& source);

MovementTrace synthesize_rd(const RdConfig& config);
MovementTrace synthesize_tvc(const TvcConfig& config);

Vec2 position_at(const NodeTrack& track, double t);
bool online_at(const NodeTrack& track, double t);

// Sampling-based proximity detection: samples at t = k * step for t < duration,
// a pair is in contact when both nodes are online and within radio_range, and a
// maximal run of in-contact samples becomes [first, last + step).
ContactTrace movement_to_contacts(const MovementTrace& trace, double radio_range,
                                  std::int64_t sample_step);
ContactTrace movement_to_contacts_serial(const MovementTrace& trace, double radio_range,
                                         std::int64_t sample_step);

// Fraction of each node's online time spent inside each community (list order
// decides priority where communities overlap); remainder is roaming time.
std::vector<std::map<LocationId, double>> trace_location_occupancy(
    const MovementTrace& trace, const std::vector<Community>& communities);

// Continuous presence intervals inside communities, rounded outward to whole
// seconds and merged; feeds the session-based statistics.
std::vector<SessionRecord> movement_to_sessions(const MovementTrace& trace,
                                                const std::vector<Community>& communities);

// Time-weighted position histogram over an nx-by-ny partition of the arena
// (row-major, y-major rows), including pauses and offline time.
std::vector<double> grid_occupancy(const MovementTrace& trace, int nx, int ny);

void write_movement(const MovementTrace& trace, std::ostream& out);
MovementTrace parse_movement(std::istream& in, const std::string& source);

namespace detail {

// Straight-line exit of a ray from p along unit direction d out of rect r.
struct Exit {
  double distance = 0.0;
  Vec2 point;
  int wall = -1;  // 0 = left, 1 = right, 2 = bottom, 3 = top; -1 = no exit
};

Exit compute_exit(const Rect& r, Vec2 p, Vec2 d);

}  // namespace detail

}  // namespace dtn
