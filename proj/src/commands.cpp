#include "dtnkit/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dtnkit/epidemic.hpp"
#include "dtnkit/mobility.hpp"
#include "dtnkit/stats.hpp"
#include "dtnkit/trace_io.hpp"

namespace dtn {

namespace {

namespace fs = std::filesystem;

void require_input(const std::string& flag, const std::string& path) {
  if (path.empty()) throw ConfigError(flag, "missing required path");
  if (!fs::exists(path)) throw ConfigError(flag, "path does not exist: " + path);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failure on " + path);
}

ContactTrace load_contacts(const std::string& path, bool skip_invalid = false) {
  std::ifstream in = open_input(path);
  ParseOptions opts;
  opts.skip_invalid = skip_invalid;
  return parse_contacts(in, path, opts).trace;
}

std::vector<SessionRecord> load_sessions(const std::string& path,
                                         bool skip_invalid = false) {
  std::ifstream in = open_input(path);
  ParseOptions opts;
  opts.skip_invalid = skip_invalid;
  return parse_sessions(in, path, opts).records;
}

}  // namespace

SynthResult cmd_synth(const SynthArgs& args, std::ostream& log) {
  require_input("--config", args.config_path);
  if (args.out_path.empty()) throw ConfigError("--out", "missing required path");

  MovementTrace trace;
  {
    std::ifstream in = open_input(args.config_path);
    if (args.model == "rd") {
      RdConfig config = parse_rd_config(in, args.config_path);
      config.seed = args.seed;
      trace = synthesize_rd(config);
    } else if (args.model == "tvc") {
      TvcConfig config = parse_tvc_config(in, args.config_path);
      config.seed = args.seed;
      trace = synthesize_tvc(config);
    } else {
      throw ConfigError("model", "must be 'rd' or 'tvc', got '" + args.model + "'");
    }
  }

  std::ofstream out = open_output(args.out_path);
  write_movement(trace, out);
  finish_output(out, args.out_path);

  SynthResult result;
  result.nodes = trace.tracks.size();
  result.duration = trace.duration;
  for (const NodeTrack& track : trace.tracks) result.segments += track.segments.size();
  log << "nodes=" << result.nodes << " duration=" << result.duration
      << " segments=" << result.segments << "\n";
  return result;
}

ContactsResult cmd_contacts(const ContactsArgs& args, std::ostream& log) {
  require_input("--in", args.in_path);
  if (args.out_path.empty()) throw ConfigError("--out", "missing required path");

  ContactsResult result;
  ContactTrace trace;
  if (args.mode == "from-sessions") {
    std::ifstream in = open_input(args.in_path);
    ParseOptions opts;
    opts.skip_invalid = args.skip_invalid;
    SessionParse parsed = parse_sessions(in, args.in_path, opts);
    result.skipped = parsed.skipped;
    trace = sessions_to_encounters(parsed.records);
    const std::string map_path = args.node_map_path.empty()
                                     ? args.out_path + ".nodes.map"
                                     : args.node_map_path;
    std::ofstream map_out = open_output(map_path);
    write_node_map(parsed.nodes, map_out);
    finish_output(map_out, map_path);
  } else if (args.mode == "from-movement") {
    std::ifstream in = open_input(args.in_path);
    MovementTrace movement = parse_movement(in, args.in_path);
    trace = movement_to_contacts(movement, args.range, args.step);
  } else {
    throw ConfigError("mode",
                      "must be 'from-sessions' or 'from-movement', got '" + args.mode + "'");
  }

  std::ofstream out = open_output(args.out_path);
  write_contacts(trace, out);
  finish_output(out, args.out_path);

  result.encounters = trace.records.size();
  result.nodes = trace.nodes.size();
  if (result.skipped > 0) log << "warning: skipped " << result.skipped << " invalid rows\n";
  log << "encounters=" << result.encounters << " nodes=" << result.nodes << "\n";
  return result;
}

SessionsResult cmd_sessions(const SessionsArgs& args, std::ostream& log) {
  require_input("--movement", args.movement_path);
  require_input("--config", args.config_path);
  if (args.out_path.empty()) throw ConfigError("--out", "missing required path");

  TvcConfig config;
  {
    std::ifstream in = open_input(args.config_path);
    config = parse_tvc_config(in, args.config_path);
  }
  MovementTrace movement;
  {
    std::ifstream in = open_input(args.movement_path);
    movement = parse_movement(in, args.movement_path);
  }
  const std::vector<SessionRecord> sessions =
      movement_to_sessions(movement, config.communities);

  std::ofstream out = open_output(args.out_path);
  write_sessions(sessions, out);
  finish_output(out, args.out_path);

  SessionsResult result;
  result.sessions = sessions.size();
  std::set<NodeId> nodes;
  for (const SessionRecord& s : sessions) nodes.insert(s.node);
  result.nodes = nodes.size();
  log << "sessions=" << result.sessions << " nodes=" << result.nodes << "\n";
  return result;
}

StatsResult cmd_stats(const StatsArgs& args, std::ostream& log) {
  require_input("--in", args.in_path);
  if (args.out_path.empty()) throw ConfigError("--out", "missing required path");

  StatsResult result;
  std::ofstream out = open_output(args.out_path);

  if (args.kind == "intermeeting" || args.kind == "duration") {
    const ContactTrace trace = load_contacts(args.in_path);
    const std::vector<std::int64_t> samples =
        args.kind == "intermeeting" ? inter_meeting_times(trace).gaps
                                    : meeting_durations(trace);
    result.samples = samples.size();
    if (samples.empty()) {
      out << "value,p\n";
      log << "warning: no samples; wrote header-only output\n";
    } else {
      write_cdf(empirical_cdf(std::span<const std::int64_t>(samples)), out);
    }
  } else if (args.kind == "location-pref") {
    const auto sessions = load_sessions(args.in_path);
    const RankedFractionCurve curve = location_preference(sessions);
    result.samples = curve.entries.size();
    if (curve.entries.empty()) log << "warning: no samples; wrote header-only output\n";
    write_prefs(curve, out);
  } else if (args.kind == "reappearance") {
    const auto sessions = load_sessions(args.in_path);
    const ReappearanceCurve curve =
        reappearance_probability(sessions, args.bin, args.max_gap);
    result.samples = sessions.size();
    if (sessions.empty()) log << "warning: no samples; wrote header-only output\n";
    write_reappearance(curve, out);
  } else if (args.kind == "tailfit") {
    const ContactTrace trace = load_contacts(args.in_path);
    const InterMeeting gaps = inter_meeting_times(trace);
    result.samples = gaps.gaps.size();
    const TailFit fit =
        tail_fit(std::span<const std::int64_t>(gaps.gaps), args.head_quantile);
    write_tailfit(fit, out);
  } else {
    throw ConfigError("kind", "unknown stats kind '" + args.kind + "'");
  }

  finish_output(out, args.out_path);
  log << "samples=" << result.samples << "\n";
  return result;
}

RouteResult cmd_route(const RouteArgs& args, std::ostream& log) {
  require_input("--contacts", args.contacts_path);
  if (args.out_dir.empty()) throw ConfigError("--out-dir", "missing required path");
  fs::create_directories(args.out_dir);

  const ContactTrace trace = load_contacts(args.contacts_path);
  Workload workload = broadcast_workload(trace);
  if (args.create_at)
    for (Message& m : workload.messages) m.t_create = *args.create_at;

  const RoutingReport report = run_epidemic(trace, workload);
  const std::string name =
      args.name.empty() ? fs::path(args.contacts_path).stem().string() : args.name;

  const fs::path dir(args.out_dir);
  {
    std::ofstream out = open_output((dir / "deliveries.csv").string());
    write_deliveries(report.deliveries, out);
    finish_output(out, (dir / "deliveries.csv").string());
  }
  {
    std::ofstream out = open_output((dir / "report.csv").string());
    write_report(report.outcomes, out);
    finish_output(out, (dir / "report.csv").string());
  }
  {
    std::ofstream out = open_output((dir / "summary.csv").string());
    write_summary(summarize(name, report), out);
    finish_output(out, (dir / "summary.csv").string());
  }
  const std::pair<const CdfSeries*, const char*> cdfs[] = {
      {&report.delay_cdf, "delay.cdf.csv"},
      {&report.reachability_cdf, "reachability.cdf.csv"},
      {&report.overhead_cdf, "overhead.cdf.csv"}};
  for (const auto& [series, file] : cdfs) {
    if (series->points.empty()) continue;
    std::ofstream out = open_output((dir / file).string());
    write_cdf(*series, out);
    finish_output(out, (dir / file).string());
  }

  RouteResult result;
  result.messages = report.outcomes.size();
  result.deliveries = report.deliveries.size();
  result.overhead = report.overhead;
  log << "messages=" << result.messages << " deliveries=" << result.deliveries
      << " transmissions=" << report.total_transmissions
      << " overhead=" << report.overhead << "\n";
  return result;
}

ReportResult cmd_report(const ReportArgs& args, std::ostream& log) {
  if (args.summary_paths.empty())
    throw ConfigError("--summary", "at least one summary file required");
  for (const std::string& path : args.summary_paths) require_input("--summary", path);
  if (args.reference.empty()) throw ConfigError("--reference", "missing trace name");
  if (args.out_path.empty()) throw ConfigError("--out", "missing required path");

  std::vector<std::vector<SummaryRow>> inputs;
  for (const std::string& path : args.summary_paths) {
    std::ifstream in = open_input(path);
    inputs.push_back(read_summary(in, path));
  }
  const std::vector<ComparedRow> rows = compare_summaries(inputs, args.reference);

  std::ofstream out = open_output(args.out_path);
  write_compared(rows, out);
  finish_output(out, args.out_path);

  std::set<std::string> traces;
  for (const ComparedRow& row : rows) traces.insert(row.row.trace);
  ReportResult result;
  result.traces = traces.size();
  log << "traces=" << result.traces << " reference=" << args.reference << "\n";
  return result;
}

}  // namespace dtn
