#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dtnkit/mobility.hpp"

namespace dtn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double to_double(const std::string& key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError(key, "invalid number '" + std::string(value) + "'");
  return out;
}

std::int64_t to_int(const std::string& key, std::string_view value) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError(key, "invalid integer '" + std::string(value) + "'");
  return out;
}

std::vector<std::string> split_fields(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = value.find(',', pos);
    if (comma == std::string_view::npos) {
      out.emplace_back(trim(value.substr(pos)));
      return out;
    }
    out.emplace_back(trim(value.substr(pos, comma - pos)));
    pos = comma + 1;
  }
}

// key=value lines; '#' lines are comments; repeated keys keep file order.
class ConfigFile {
 public:
  ConfigFile(std::istream& in, const std::string& source,
             const std::set<std::string>& single_keys,
             const std::set<std::string>& repeated_keys)
      : source_(source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string_view text = trim(line);
      if (text.empty() || text.front() == '#') continue;
      const std::size_t eq = text.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(source_ + ":" + std::to_string(lineno),
                          "expected key=value, got '" + std::string(text) + "'");
      const std::string key{trim(text.substr(0, eq))};
      const std::string value{trim(text.substr(eq + 1))};
      if (key.empty())
        throw ConfigError(source_ + ":" + std::to_string(lineno), "empty key");
      if (repeated_keys.contains(key)) {
        repeated_[key].push_back(value);
      } else if (single_keys.contains(key)) {
        if (!singles_.emplace(key, value).second)
          throw ConfigError(key, "given more than once (line " +
                                     std::to_string(lineno) + " of " + source_ + ")");
      } else {
        throw ConfigError(key, "unknown key (line " + std::to_string(lineno) + " of " +
                                   source_ + ")");
      }
    }
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = singles_.find(key);
    if (it == singles_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& require(const std::string& key) const {
    auto it = singles_.find(key);
    if (it == singles_.end())
      throw ConfigError(key, "missing required key in " + source_);
    return it->second;
  }

  double require_double(const std::string& key) const {
    return to_double(key, require(key));
  }

  std::size_t require_count(const std::string& key) const {
    const std::int64_t v = to_int(key, require(key));
    if (v < 0) throw ConfigError(key, "must be >= 0");
    return static_cast<std::size_t>(v);
  }

  std::vector<std::string> repeated(const std::string& key) const {
    auto it = repeated_.find(key);
    if (it == repeated_.end()) return {};
    return it->second;
  }

  bool has(const std::string& key) const { return singles_.contains(key); }

 private:
  std::string source_;
  std::map<std::string, std::string> singles_;
  std::map<std::string, std::vector<std::string>> repeated_;
};

}  // namespace

RdConfig parse_rd_config(std::istream& in, const std::string& source) {
  const std::set<std::string> singles = {
      "arena.width",  "arena.height", "nodes",         "duration",
      "speed.min",    "speed.max",    "pause.min",     "pause.max",
      "onoff.on.min", "onoff.on.max", "onoff.off.min", "onoff.off.max"};
  const ConfigFile file(in, source, singles, {});

  RdConfig config;
  config.arena.width = file.require_double("arena.width");
  config.arena.height = file.require_double("arena.height");
  config.n_nodes = file.require_count("nodes");
  config.duration = file.require_double("duration");
  config.speed_min = file.require_double("speed.min");
  config.speed_max = file.require_double("speed.max");
  config.pause_min = file.require_double("pause.min");
  config.pause_max = file.require_double("pause.max");

  const bool any_onoff = file.has("onoff.on.min") || file.has("onoff.on.max") ||
                         file.has("onoff.off.min") || file.has("onoff.off.max");
  if (any_onoff) {
    OnOff onoff;
    onoff.on_min = file.require_double("onoff.on.min");
    onoff.on_max = file.require_double("onoff.on.max");
    onoff.off_min = file.require_double("onoff.off.min");
    onoff.off_max = file.require_double("onoff.off.max");
    config.onoff = onoff;
  }
  validate(config);
  return config;
}

TvcConfig parse_tvc_config(std::istream& in, const std::string& source) {
  const std::set<std::string> singles = {"arena.width", "arena.height", "nodes",
                                         "duration",    "speed.min",    "speed.max",
                                         "pause.min",   "pause.max",    "epoch.min",
                                         "epoch.max",   "cycle"};
  const std::set<std::string> repeated = {"period", "community", "group", "prefs",
                                          "online"};
  const ConfigFile file(in, source, singles, repeated);

  TvcConfig config;
  config.arena.width = file.require_double("arena.width");
  config.arena.height = file.require_double("arena.height");
  config.n_nodes = file.require_count("nodes");
  config.duration = file.require_double("duration");
  config.speed_min = file.require_double("speed.min");
  config.speed_max = file.require_double("speed.max");
  config.pause_min = file.require_double("pause.min");
  config.pause_max = file.require_double("pause.max");
  config.epoch_min = file.require_double("epoch.min");
  config.epoch_max = file.require_double("epoch.max");
  config.schedule.cycle = file.require_double("cycle");

  for (const std::string& value : file.repeated("period")) {
    const auto fields = split_fields(value);
    if (fields.size() != 3)
      throw ConfigError("period", "expected <label>,<offset>,<length>, got '" + value + "'");
    config.schedule.periods.push_back({fields[0], to_double("period", fields[1]),
                                       to_double("period", fields[2])});
  }
  if (config.schedule.periods.empty())
    throw ConfigError("period", "missing required key in " + source);
  std::stable_sort(config.schedule.periods.begin(), config.schedule.periods.end(),
                   [](const TimePeriod& a, const TimePeriod& b) {
                     return a.offset < b.offset;
                   });

  for (const std::string& value : file.repeated("community")) {
    const auto fields = split_fields(value);
    if (fields.size() != 5)
      throw ConfigError("community",
                        "expected <id>,<x0>,<y0>,<x1>,<y1>, got '" + value + "'");
    Community comm;
    comm.id = fields[0];
    comm.bounds = {to_double("community", fields[1]), to_double("community", fields[2]),
                   to_double("community", fields[3]), to_double("community", fields[4])};
    config.communities.push_back(std::move(comm));
  }

  for (const std::string& value : file.repeated("group")) {
    const auto fields = split_fields(value);
    if (fields.size() != 2)
      throw ConfigError("group", "expected <name>,<count>, got '" + value + "'");
    const std::int64_t count = to_int("group", fields[1]);
    if (count < 0) throw ConfigError("group", "count must be >= 0");
    config.groups.push_back({fields[0], static_cast<std::size_t>(count)});
  }
  if (config.groups.empty()) config.groups.push_back({"all", config.n_nodes});

  auto group_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t g = 0; g < config.groups.size(); ++g)
      if (config.groups[g].name == name) return g;
    throw ConfigError("prefs", "unknown group '" + name + "'");
  };
  auto period_index = [&](const std::string& key, const std::string& label) -> std::size_t {
    for (std::size_t p = 0; p < config.schedule.periods.size(); ++p)
      if (config.schedule.periods[p].label == label) return p;
    throw ConfigError(key, "unknown period '" + label + "'");
  };

  config.probs.assign(config.groups.size(),
                      std::vector<std::vector<double>>(config.schedule.periods.size()));
  for (const std::string& value : file.repeated("prefs")) {
    const auto fields = split_fields(value);
    if (fields.size() < 3)
      throw ConfigError("prefs",
                        "expected <group>,<period>,<p...>,<p_roam>, got '" + value + "'");
    const std::size_t g = group_index(fields[0]);
    const std::size_t p = period_index("prefs", fields[1]);
    if (!config.probs[g][p].empty())
      throw ConfigError("prefs", "duplicate row for group '" + fields[0] +
                                     "', period '" + fields[1] + "'");
    for (std::size_t k = 2; k < fields.size(); ++k)
      config.probs[g][p].push_back(to_double("prefs", fields[k]));
  }
  for (std::size_t g = 0; g < config.groups.size(); ++g)
    for (std::size_t p = 0; p < config.schedule.periods.size(); ++p)
      if (config.probs[g][p].empty())
        throw ConfigError("prefs", "missing row for group '" + config.groups[g].name +
                                       "', period '" +
                                       config.schedule.periods[p].label + "'");

  config.online_prob.assign(config.schedule.periods.size(), 1.0);
  std::set<std::size_t> online_seen;
  for (const std::string& value : file.repeated("online")) {
    const auto fields = split_fields(value);
    if (fields.size() != 2)
      throw ConfigError("online", "expected <period>,<prob>, got '" + value + "'");
    const std::size_t p = period_index("online", fields[0]);
    if (!online_seen.insert(p).second)
      throw ConfigError("online", "duplicate row for period '" + fields[0] + "'");
    config.online_prob[p] = to_double("online", fields[1]);
  }

  validate(config);
  return config;
}

}  // namespace dtn
