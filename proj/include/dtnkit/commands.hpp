#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dtn {

// Pipeline stages behind the CLI subcommands.  Each validates its input
// paths up front (missing path -> ConfigError), writes its artifacts, and
// logs a one-line result to `log`.

struct SynthArgs {
  std::string model;  // "rd" or "tvc"
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
};

struct SynthResult {
  std::size_t nodes = 0;
  double duration = 0.0;
  std::size_t segments = 0;
};

SynthResult cmd_synth(const SynthArgs& args, std::ostream& log);

struct ContactsArgs {
  std::string mode;  // "from-sessions" or "from-movement"
  std::string in_path;
  std::string out_path;
  std::string node_map_path;  // from-sessions only; default "<out>.nodes.map"
  double range = 10.0;
  std::int64_t step = 1;
  bool skip_invalid = false;
};

struct ContactsResult {
  std::size_t encounters = 0;
  std::size_t nodes = 0;
  std::size_t skipped = 0;
};

ContactsResult cmd_contacts(const ContactsArgs& args, std::ostream& log);

struct SessionsArgs {
  std::string movement_path;
  std::string config_path;  // TVC config supplying the community rectangles
  std::string out_path;
};

struct SessionsResult {
  std::size_t sessions = 0;
  std::size_t nodes = 0;
};

SessionsResult cmd_sessions(const SessionsArgs& args, std::ostream& log);

struct StatsArgs {
  std::string kind;  // intermeeting | duration | location-pref | reappearance | tailfit
  std::string in_path;
  std::string out_path;
  std::int64_t bin = 3600;
  std::int64_t max_gap = 7 * 86400;
  double head_quantile = 0.9;
};

struct StatsResult {
  std::size_t samples = 0;
};

StatsResult cmd_stats(const StatsArgs& args, std::ostream& log);

struct RouteArgs {
  std::string contacts_path;
  std::string out_dir;
  std::string name;  // summary trace name; default: contacts file stem
  std::optional<std::int64_t> create_at;
};

struct RouteResult {
  std::size_t messages = 0;
  std::size_t deliveries = 0;
  double overhead = 0.0;
};

RouteResult cmd_route(const RouteArgs& args, std::ostream& log);

struct ReportArgs {
  std::vector<std::string> summary_paths;
  std::string reference;
  std::string out_path;
};

struct ReportResult {
  std::size_t traces = 0;
};

ReportResult cmd_report(const ReportArgs& args, std::ostream& log);

}  // namespace dtn
