#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rotbec/error.hpp"

namespace rotbec::cli {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + " " + what);
}

// Checked access to one JSON object; remembers its path for diagnostics.
class Section {
 public:
  Section(const json& node, std::string path, std::set<std::string> allowed) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
    for (const auto& [key, _] : node_.items()) {
      if (!allowed.contains(key)) fail(at(key), "is not a known key");
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }

  [[nodiscard]] Section child(const std::string& key, std::set<std::string> allowed) const {
    static const json empty = json::object();
    return Section(has(key) ? node_.at(key) : empty, at(key), std::move(allowed));
  }

  void read(const std::string& key, double& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) fail(at(key), "must be a finite number");
    out = v.get<double>();
  }

  void read(const std::string& key, std::optional<double>& out) const {
    if (!has(key) || node_.at(key).is_null()) return;
    double v = 0.0;
    read(key, v);
    out = v;
  }

  template <class Int>
    requires std::is_integral_v<Int>
  void read(const std::string& key, Int& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if constexpr (std::is_unsigned_v<Int>) {
      if (!v.is_number_unsigned()) fail(at(key), "must be an unsigned 64-bit integer");
      out = v.get<Int>();
    } else {
      if (!v.is_number_integer()) fail(at(key), "must be an integer");
      out = v.get<Int>();
    }
  }

  void read(const std::string& key, bool& out) const {
    if (!has(key)) return;
    if (!node_.at(key).is_boolean()) fail(at(key), "must be true or false");
    out = node_.at(key).get<bool>();
  }

  void read(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!node_.at(key).is_string()) fail(at(key), "must be a string");
    out = node_.at(key).get<std::string>();
  }

  void read(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (v.is_number()) {
      out = {v.get<double>()};
      return;
    }
    if (!v.is_array() || v.empty()) fail(at(key), "must be a number or a nonempty array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) fail(at(key), "must contain only numbers");
      out.push_back(e.get<double>());
    }
  }

 private:
  [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
};

std::vector<double> split_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("potential: bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

}  // namespace

PotentialSpec parse_potential(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  const std::vector<double> p = args.empty() ? std::vector<double>{} : split_numbers(args, text);

  auto expect = [&](std::size_t count) {
    if (p.size() != count) {
      throw ConfigError("potential: '" + family + "' takes " + std::to_string(count) + " parameter(s), got '" + text + "'");
    }
  };
  if (family == "harmonic") {
    expect(0);
    return PotentialSpec::harmonic();
  }
  if (family == "power") {
    expect(1);
    return PotentialSpec(PowerTrap{p[0]}, text);
  }
  if (family == "quartic_quadratic" || family == "quartic") {
    expect(2);
    return PotentialSpec(QuarticQuadraticTrap{p[0], p[1]}, text);
  }
  if (family == "shifted_harmonic" || family == "shifted") {
    expect(2);
    return PotentialSpec(ShiftedHarmonicTrap{{p[0], p[1]}}, text);
  }
  throw ConfigError("potential: unknown family '" + family +
                    "' (expected power:s, harmonic, quartic_quadratic:k,q or shifted_harmonic:bx,by)");
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  const Section root(doc, "",
                     {"command", "grid", "problem", "minimize", "seed", "output", "strict", "unsafe_nonexistence_scan",
                      "analyze", "workers", "trial_scan", "spectrum"});
  root.read("command", cfg.command);
  root.read("seed", cfg.seed);
  root.read("output", cfg.output);
  root.read("strict", cfg.strict);
  root.read("unsafe_nonexistence_scan", cfg.unsafe);
  root.read("analyze", cfg.analyze);
  root.read("workers", cfg.workers);

  const Section grid = root.child("grid", {"n", "L"});
  grid.read("n", cfg.n);
  grid.read("L", cfg.half_width);

  const Section prob = root.child("problem", {"a", "a_over_astar", "omega", "potential"});
  prob.read("a", cfg.a);
  prob.read("a_over_astar", cfg.a_over_astar);
  prob.read("omega", cfg.omega);
  prob.read("potential", cfg.potential);

  const Section min = root.child("minimize", {"dt", "tol", "max_steps", "residual_tol", "init", "multistart", "solve_scale"});
  min.read("dt", cfg.dt);
  min.read("tol", cfg.tol);
  min.read("max_steps", cfg.max_steps);
  min.read("residual_tol", cfg.residual_tol);
  min.read("init", cfg.init);
  min.read("multistart", cfg.multistart);
  min.read("solve_scale", cfg.solve_scale);

  const Section trial = root.child("trial_scan", {"tau", "x0", "n", "box_factor"});
  trial.read("tau", cfg.tau);
  if (trial.has("x0")) {
    std::vector<double> x0;
    trial.read("x0", x0);
    if (x0.size() != 2) fail("trial_scan.x0", "must hold two numbers");
    cfg.x0_x = x0[0];
    cfg.x0_y = x0[1];
  }
  trial.read("n", cfg.trial_n);
  trial.read("box_factor", cfg.box_factor);

  const Section spec = root.child("spectrum", {"operator", "sector", "count", "h", "r_max"});
  spec.read("operator", cfg.op);
  spec.read("sector", cfg.sector);
  spec.read("count", cfg.count);
  spec.read("h", cfg.spectrum_h);
  spec.read("r_max", cfg.spectrum_r_max);

  if (cfg.command.empty()) fail("command", "is required");
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
    fail("command", "must be one of townes, minimize, sweep, trial-scan, analyze, spectrum");
  }
  const bool needs_strength = cfg.command == "minimize" || cfg.command == "sweep" || cfg.command == "trial-scan" ||
                              cfg.command == "analyze";
  if (cfg.a.empty() == cfg.a_over_astar.empty()) {
    if (needs_strength || !cfg.a.empty()) fail("problem", "needs exactly one of a / a_over_astar");
  }
  if ((cfg.command == "minimize" || cfg.command == "trial-scan") && cfg.a.size() + cfg.a_over_astar.size() != 1) {
    fail("problem", cfg.command + " takes a single interaction strength");
  }
  if (!(cfg.omega >= 0.0)) fail("problem.omega", "must be >= 0");
  (void)parse_potential(cfg.potential);
  if (cfg.init != "gaussian" && cfg.init != "vortex" && cfg.init != "random") {
    fail("minimize.init", "must be gaussian, vortex or random");
  }
  if (cfg.workers < 1) fail("workers", "must be at least 1");
  if (cfg.output.empty()) fail("output", "must name a directory");
  if (cfg.op != "L" && cfg.op != "L_hat") fail("spectrum.operator", "must be L or L_hat");
  if (cfg.count < 1) fail("spectrum.count", "must be at least 1");
  if (cfg.sector < 0) fail("spectrum.sector", "must be >= 0");
  if (cfg.tau.empty()) fail("trial_scan.tau", "must not be empty");
  for (double t : cfg.tau) {
    if (!(t > 0.0)) fail("trial_scan.tau", "must be positive");
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["command"] = cfg.command;
  doc["grid"] = {{"n", cfg.n}, {"L", cfg.half_width}};
  json prob = {{"omega", cfg.omega}, {"potential", cfg.potential}};
  if (!cfg.a.empty()) prob["a"] = cfg.a;
  if (!cfg.a_over_astar.empty()) prob["a_over_astar"] = cfg.a_over_astar;
  doc["problem"] = prob;
  doc["minimize"] = {{"dt", cfg.dt},
                     {"tol", cfg.tol},
                     {"max_steps", cfg.max_steps},
                     {"residual_tol", cfg.residual_tol},
                     {"init", cfg.init},
                     {"multistart", cfg.multistart},
                     {"solve_scale", cfg.solve_scale ? json(*cfg.solve_scale) : json(nullptr)}};
  doc["seed"] = cfg.seed;
  doc["output"] = cfg.output;
  doc["strict"] = cfg.strict;
  doc["unsafe_nonexistence_scan"] = cfg.unsafe;
  doc["analyze"] = cfg.analyze;
  doc["workers"] = cfg.workers;
  doc["trial_scan"] = {{"tau", cfg.tau}, {"x0", {cfg.x0_x, cfg.x0_y}}, {"n", cfg.trial_n}, {"box_factor", cfg.box_factor}};
  doc["spectrum"] = {{"operator", cfg.op},
                     {"sector", cfg.sector},
                     {"count", cfg.count},
                     {"h", cfg.spectrum_h},
                     {"r_max", cfg.spectrum_r_max}};
  return doc;
}

std::vector<double> resolve_strengths(const RunConfig& cfg, double a_star) {
  if (!cfg.a.empty()) return cfg.a;
  std::vector<double> out;
  out.reserve(cfg.a_over_astar.size());
  for (double f : cfg.a_over_astar) out.push_back(f * a_star);
  return out;
}

void set_path(json& doc, const std::vector<std::string>& path, json value) {
  json* node = &doc;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (!node->contains(path[k]) || !(*node)[path[k]].is_object()) (*node)[path[k]] = json::object();
    node = &(*node)[path[k]];
  }
  (*node)[path.back()] = std::move(value);
}

}  // namespace rotbec::cli
