#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rotbec/potential.hpp"

namespace rotbec::cli {

using nlohmann::json;

/// Fully resolved run configuration. Every physical default is written back
/// into the manifest, so a run never depends on an implicit value.
struct RunConfig {
  std::string command;

  int n = 256;
  double half_width = 12.0;

  std::vector<double> a;             ///< absolute strengths, or
  std::vector<double> a_over_astar;  ///< strengths relative to a*; exactly one is set
  double omega = 0.0;
  std::string potential = "power:2";

  double dt = 5e-3;
  double tol = 1e-9;
  long max_steps = 200000;
  double residual_tol = 1e-6;
  std::string init = "gaussian";
  bool multistart = true;
  std::optional<double> solve_scale;

  std::uint64_t seed = 0;
  std::string output = "rotbec-run";
  bool strict = false;
  bool unsafe = false;
  bool analyze = false;
  int workers = 1;

  std::vector<double> tau{2, 4, 6, 8, 10, 12};
  double x0_x = 0.0;
  double x0_y = 0.0;
  int trial_n = 512;
  double box_factor = 12.0;

  std::string op = "L";
  int sector = 0;
  int count = 4;
  double spectrum_h = 0.01;
  double spectrum_r_max = 20.0;
};

inline const std::vector<std::string> kCommands{"townes", "minimize", "sweep", "trial-scan", "analyze", "spectrum"};

/// Reads the nested config document. Unknown keys and type mismatches raise
/// ConfigError naming the offending path.
[[nodiscard]] RunConfig parse_config(const json& doc);

/// Inverse of parse_config with every field present.
[[nodiscard]] json to_json(const RunConfig& cfg);

/// "power:s", "harmonic", "quartic_quadratic:k,q", "shifted_harmonic:bx,by".
[[nodiscard]] PotentialSpec parse_potential(const std::string& text);

/// Absolute strengths, resolving a_over_astar against a_star.
[[nodiscard]] std::vector<double> resolve_strengths(const RunConfig& cfg, double a_star);

/// Sets doc[path[0]][path[1]]... = value, creating objects along the way.
void set_path(json& doc, const std::vector<std::string>& path, json value);

}  // namespace rotbec::cli
