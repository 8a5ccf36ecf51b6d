#include "config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace pilot {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, RawEntry> parse_kv(const std::string& text,
                                         const std::string& origin) {
  std::map<std::string, RawEntry> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected `key = value`, got `" + t + "`");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": empty key or value");
    if (out.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key `" + key + "`");
    out[key] = {value, lineno};
  }
  return out;
}

// pulls typed values out of the raw map, tracking consumption so leftover
// (unknown) keys can be reported with their line numbers
class Reader {
public:
  Reader(std::map<std::string, RawEntry> raw, std::string origin)
      : raw_(std::move(raw)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) {
    const RawEntry* e = take(key);
    return e ? e->value : dflt;
  }

  double get_double(const std::string& key, double dflt) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    try {
      std::size_t pos = 0;
      const double v = std::stod(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(at(key, *e) + ": `" + e->value + "` is not a number");
    }
  }

  long long get_int(const std::string& key, long long dflt) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    long long v = 0;
    const char* b = e->value.data();
    const char* end = b + e->value.size();
    const auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc{} || r.ptr != end)
      throw ConfigError(at(key, *e) + ": `" + e->value + "` is not an integer");
    return v;
  }

  bool get_bool(const std::string& key, bool dflt) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    throw ConfigError(at(key, *e) + ": expected true or false, got `" +
                      e->value + "`");
  }

  void fail_value(const std::string& key, const std::string& why) const {
    const auto it = seen_.find(key);
    const std::string where =
        it != seen_.end() ? at(key, it->second) : origin_ + ": key `" + key + "`";
    throw ConfigError(where + ": " + why);
  }

  void finish() const {
    if (raw_.empty()) return;
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& [k, e] : raw_)
      msg += " `" + k + "` (line " + std::to_string(e.line) + ")";
    throw ConfigError(msg);
  }

private:
  const RawEntry* take(const std::string& key) {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return nullptr;
    seen_[key] = it->second;
    raw_.erase(it);
    return &seen_[key];
  }

  std::string at(const std::string& key, const RawEntry& e) const {
    return origin_ + ":" + std::to_string(e.line) + ": key `" + key + "`";
  }

  std::map<std::string, RawEntry> raw_;
  std::map<std::string, RawEntry> seen_;
  std::string origin_;
};

} // namespace

RunConfig parse_run_config_text(const std::string& text,
                                const std::string& origin) {
  Reader r(parse_kv(text, origin), origin);
  RunConfig cfg;

  const std::string kind = r.get_string("scenario.kind", "plane_wave");
  if (kind == "plane_wave") cfg.scenario.kind = Scenario::PlaneWave;
  else if (kind == "gaussian_packet") cfg.scenario.kind = Scenario::GaussianPacket;
  else if (kind == "superposition") cfg.scenario.kind = Scenario::Superposition;
  else
    r.fail_value("scenario.kind",
                 "must be plane_wave, gaussian_packet or superposition");
  cfg.scenario.p = r.get_double("scenario.p", 0.0);
  cfg.scenario.p2 = r.get_double("scenario.p2", 0.0);
  cfg.scenario.x0 = r.get_double("scenario.x0", 0.0);
  cfg.scenario.width = r.get_double("scenario.width", 1.0);
  cfg.scenario.w1 = r.get_double("scenario.w1", 1.0);
  cfg.scenario.w2 = r.get_double("scenario.w2", 1.0);

  cfg.nx = static_cast<int>(r.get_int("grid.nx", cfg.nx));
  cfg.dx = r.get_double("grid.dx", cfg.dx);
  if (cfg.nx < 8 || (cfg.nx & (cfg.nx - 1)) != 0)
    r.fail_value("grid.nx", "must be a power of two >= 8");
  if (cfg.dx <= 0) r.fail_value("grid.dx", "must be positive");

  const std::string mode = r.get_string("solver.mode", "free");
  if (mode == "free") cfg.mode = RunMode::Free;
  else if (mode == "phase_sourced") cfg.mode = RunMode::PhaseSourced;
  else if (mode == "coupled") cfg.mode = RunMode::Coupled;
  else r.fail_value("solver.mode", "must be free, phase_sourced or coupled");
  cfg.solver.dt = r.get_double("solver.dt", cfg.solver.dt);
  cfg.solver.steps = static_cast<int>(r.get_int("solver.steps", cfg.solver.steps));
  cfg.solver.m = r.get_double("solver.m", cfg.solver.m);
  cfg.solver.k = r.get_double("solver.k", cfg.solver.k);
  cfg.solver.eps = r.get_double("solver.eps", cfg.solver.eps);
  if (cfg.solver.dt <= 0) r.fail_value("solver.dt", "must be positive");
  if (cfg.solver.steps < 1) r.fail_value("solver.steps", "must be >= 1");
  if (cfg.solver.m < 0) r.fail_value("solver.m", "must be >= 0");
  if (cfg.mode == RunMode::Coupled) {
    if (cfg.solver.k == 0) r.fail_value("solver.k", "must be nonzero in coupled mode");
    if (cfg.solver.eps < 2.0 * cfg.dx)
      r.fail_value("solver.eps", "must be >= 2 * grid.dx");
  }

  const bool has_dst = r.has("source.dst"), has_dsx = r.has("source.dsx");
  cfg.source_dst = r.get_double("source.dst", 0.0);
  cfg.source_dsx = r.get_double("source.dsx", 0.0);
  if (cfg.mode != RunMode::PhaseSourced && (has_dst || has_dsx))
    r.fail_value(has_dst ? "source.dst" : "source.dsx",
                 "source.* applies only to solver.mode = phase_sourced");

  cfg.particle_given = r.has("particle.x");
  cfg.particle_x = r.get_double("particle.x", 0.0);
  cfg.particle_u1 = r.get_double("particle.u1", 0.0);
  if (cfg.mode == RunMode::Coupled && !cfg.particle_given)
    throw ConfigError(origin + ": coupled mode requires particle.x");

  cfg.ensemble_n = static_cast<int>(r.get_int("ensemble.n", 0));
  if (cfg.ensemble_n < 0) r.fail_value("ensemble.n", "must be >= 0");
  const long long seed = r.get_int("ensemble.seed", 1);
  if (seed < 0) r.fail_value("ensemble.seed", "must be >= 0");
  cfg.ensemble_seed = static_cast<std::uint64_t>(seed);
  if (cfg.mode == RunMode::Coupled && cfg.ensemble_n > 0)
    r.fail_value("ensemble.n", "ensembles apply only to free/phase_sourced modes");

  cfg.output_dir = r.get_string("output.dir", cfg.output_dir);
  cfg.fields_every = static_cast<int>(r.get_int("output.fields_every", 0));
  if (cfg.fields_every < 0) r.fail_value("output.fields_every", "must be >= 0");

  cfg.emit_fields = r.get_bool("emit.fields", cfg.emit_fields);
  cfg.emit_trajectory = r.get_bool("emit.trajectory", cfg.emit_trajectory);
  cfg.emit_energy = r.get_bool("emit.energy", cfg.emit_energy);
  cfg.emit_action = r.get_bool("emit.action", cfg.emit_action);
  cfg.emit_plots = r.get_bool("emit.plots", cfg.emit_plots);

  r.finish();
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file `" + path + "`");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_run_config_text(ss.str(), path);
}

} // namespace pilot
