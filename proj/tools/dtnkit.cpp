#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtnkit/commands.hpp"
#include "dtnkit/core.hpp"

int main(int argc, char** argv) {
  CLI::App app{"trace-driven DTN experimentation toolkit"};
  app.require_subcommand(1);

  dtn::SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "synthesize a movement trace");
  synth_cmd->add_option("model", synth.model, "mobility model")
      ->required()
      ->check(CLI::IsMember({"rd", "tvc"}));
  synth_cmd->add_option("--config", synth.config_path, "model configuration file")
      ->required();
  synth_cmd->add_option("--seed", synth.seed, "64-bit master seed")->required();
  synth_cmd->add_option("--out", synth.out_path, "output movement.csv")->required();

  dtn::ContactsArgs contacts;
  CLI::App* contacts_cmd =
      app.add_subcommand("contacts", "derive an encounter trace");
  contacts_cmd->add_option("mode", contacts.mode, "conversion mode")
      ->required()
      ->check(CLI::IsMember({"from-sessions", "from-movement"}));
  contacts_cmd->add_option("--in", contacts.in_path, "sessions.csv or movement.csv")
      ->required();
  contacts_cmd->add_option("--out", contacts.out_path, "output contacts.csv")->required();
  contacts_cmd->add_option("--range", contacts.range,
                           "radio range in grid units (from-movement)");
  contacts_cmd->add_option("--step", contacts.step,
                           "sampling step in seconds (from-movement)");
  contacts_cmd->add_option("--node-map", contacts.node_map_path,
                           "node dictionary path (from-sessions)");
  contacts_cmd->add_flag("--skip-invalid", contacts.skip_invalid,
                         "skip invalid rows instead of failing");

  dtn::SessionsArgs sessions;
  CLI::App* sessions_cmd = app.add_subcommand(
      "sessions", "derive community presence sessions from a movement trace");
  sessions_cmd->add_option("--movement", sessions.movement_path, "movement.csv")
      ->required();
  sessions_cmd
      ->add_option("--config", sessions.config_path,
                   "TVC config supplying the community rectangles")
      ->required();
  sessions_cmd->add_option("--out", sessions.out_path, "output sessions.csv")->required();

  dtn::StatsArgs stats;
  CLI::App* stats_cmd = app.add_subcommand("stats", "compute trace statistics");
  stats_cmd->add_option("kind", stats.kind, "statistic to compute")
      ->required()
      ->check(CLI::IsMember(
          {"intermeeting", "duration", "location-pref", "reappearance", "tailfit"}));
  stats_cmd->add_option("--in", stats.in_path, "contacts.csv or sessions.csv")->required();
  stats_cmd->add_option("--out", stats.out_path, "output file")->required();
  stats_cmd->add_option("--bin", stats.bin, "reappearance bin width in seconds");
  stats_cmd->add_option("--max-gap", stats.max_gap,
                        "largest reappearance gap in seconds");
  stats_cmd->add_option("--head-quantile", stats.head_quantile,
                        "CCDF head/tail split quantile for tailfit");

  dtn::RouteArgs route;
  std::int64_t create_at = 0;
  CLI::App* route_cmd = app.add_subcommand("route", "run epidemic routing");
  route_cmd->add_option("--contacts", route.contacts_path, "canonical contacts.csv")
      ->required();
  route_cmd->add_option("--out-dir", route.out_dir, "output directory")->required();
  route_cmd->add_option("--name", route.name, "trace name used in summary.csv");
  CLI::Option* create_at_opt = route_cmd->add_option(
      "--create-at", create_at, "message creation time (default: first contact start)");

  dtn::ReportArgs report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "merge routing summaries against a reference");
  report_cmd->add_option("--summary", report.summary_paths, "summary.csv files")
      ->required()
      ->expected(-1);
  report_cmd->add_option("--reference", report.reference, "reference trace name")
      ->required();
  report_cmd->add_option("--out", report.out_path, "output comparison csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      dtn::cmd_synth(synth, std::cout);
    } else if (contacts_cmd->parsed()) {
      dtn::cmd_contacts(contacts, std::cout);
    } else if (sessions_cmd->parsed()) {
      dtn::cmd_sessions(sessions, std::cout);
    } else if (stats_cmd->parsed()) {
      dtn::cmd_stats(stats, std::cout);
    } else if (route_cmd->parsed()) {
      if (create_at_opt->count() > 0) route.create_at = create_at;
      dtn::cmd_route(route, std::cout);
    } else if (report_cmd->parsed()) {
      dtn::cmd_report(report, std::cout);
    }
  } catch (const dtn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
