#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "artifacts.hpp"
#include "commands.hpp"
#include "rotbec/error.hpp"

using namespace rotbec;
using namespace rotbec::cli;

int main(int argc, char** argv) {
  CLI::App app{"Ground states of rotating attractive condensates: Townes profile, minimization, sweeps, scans"};
  app.set_version_flag("--version", std::string(ROTBEC_VERSION));

  std::string command, config_path, potential, init, output, op, x0;
  std::string a_list, a_rel_list, tau_list;
  double omega = 0, L = 0, dt = 0, tol = 0, residual_tol = 0, solve_scale = 0, box_factor = 0;
  int n = 0, workers = 0, sector = 0, count = 0, trial_n = 0;
  long max_steps = 0;
  std::uint64_t seed = 0;

  app.add_option("command", command, "townes | minimize | sweep | trial-scan | analyze | spectrum")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON run configuration; flags override its values")->check(CLI::ExistingFile);

  // Each override: flag, JSON path, value producer.
  struct Override {
    CLI::Option* opt;
    std::vector<std::string> path;
    std::function<json()> value;
  };
  std::vector<Override> overrides;
  auto add = [&](CLI::Option* opt, std::vector<std::string> path, std::function<json()> value) {
    overrides.push_back({opt, std::move(path), std::move(value)});
  };
  auto list = [](const std::string& s) {
    json arr = json::array();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        arr.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("expected a comma-separated list of numbers, got '" + s + "'");
      }
    }
    return arr;
  };

  add(app.add_option("--potential", potential, "power:s | harmonic | quartic_quadratic:k,q | shifted_harmonic:bx,by"),
      {"problem", "potential"}, [&] { return json(potential); });
  add(app.add_option("--omega", omega, "rotation speed"), {"problem", "omega"}, [&] { return json(omega); });
  auto* a_opt = app.add_option("--a", a_list, "interaction strengths, comma separated");
  auto* rel_opt = app.add_option("--a-over-astar", a_rel_list, "interaction strengths relative to a*, comma separated");
  a_opt->excludes(rel_opt);
  add(a_opt, {"problem", "a"}, [&] { return list(a_list); });
  add(rel_opt, {"problem", "a_over_astar"}, [&] { return list(a_rel_list); });
  add(app.add_option("--n", n, "grid points per side (power of two)"), {"grid", "n"}, [&] { return json(n); });
  add(app.add_option("--L", L, "solve-frame half width"), {"grid", "L"}, [&] { return json(L); });
  add(app.add_option("--dt", dt, "initial flow step"), {"minimize", "dt"}, [&] { return json(dt); });
  add(app.add_option("--tol", tol, "relative energy decrease per unit step"), {"minimize", "tol"},
      [&] { return json(tol); });
  add(app.add_option("--residual-tol", residual_tol, "Euler-Lagrange residual bound"), {"minimize", "residual_tol"},
      [&] { return json(residual_tol); });
  add(app.add_option("--max-steps", max_steps, "flow step limit"), {"minimize", "max_steps"},
      [&] { return json(max_steps); });
  add(app.add_option("--init", init, "gaussian | vortex | random")->check(CLI::IsMember({"gaussian", "vortex", "random"})),
      {"minimize", "init"}, [&] { return json(init); });
  add(app.add_option("--solve-scale", solve_scale, "fixed solve scale instead of the predicted length"),
      {"minimize", "solve_scale"}, [&] { return json(solve_scale); });
  add(app.add_flag("--no-multistart", "solve the first sweep point from the configured start only"),
      {"minimize", "multistart"}, [] { return json(false); });
  add(app.add_option("--seed", seed, "64-bit seed for random starts"), {"seed"}, [&] { return json(seed); });
  add(app.add_option("--out", output, "output directory"), {"output"}, [&] { return json(output); });
  add(app.add_flag("--strict", "strict accuracy gates; unconverged points fail the run"), {"strict"},
      [] { return json(true); });
  add(app.add_flag("--unsafe-nonexistence-scan", "run the flow outside the existence regime"),
      {"unsafe_nonexistence_scan"}, [] { return json(true); });
  add(app.add_flag("--analyze", "write the blow-up analysis report after a sweep"), {"analyze"},
      [] { return json(true); });
  add(app.add_option("--workers", workers, "concurrent multistart solves"), {"workers"}, [&] { return json(workers); });
  add(app.add_option("--tau", tau_list, "trial-scan concentration parameters, comma separated"), {"trial_scan", "tau"},
      [&] { return list(tau_list); });
  add(app.add_option("--x0", x0, "trial-scan center x,y"), {"trial_scan", "x0"}, [&] {
    json v = list(x0);
    if (v.size() != 2) throw ConfigError("--x0 takes two numbers");
    return v;
  });
  add(app.add_option("--trial-n", trial_n, "trial-scan grid points per side"), {"trial_scan", "n"},
      [&] { return json(trial_n); });
  add(app.add_option("--box-factor", box_factor, "trial-scan half width times tau"), {"trial_scan", "box_factor"},
      [&] { return json(box_factor); });
  add(app.add_option("--operator", op, "L | L_hat")->check(CLI::IsMember({"L", "L_hat"})), {"spectrum", "operator"},
      [&] { return json(op); });
  add(app.add_option("--sector", sector, "angular index m"), {"spectrum", "sector"}, [&] { return json(sector); });
  add(app.add_option("--count", count, "eigenpairs to compute"), {"spectrum", "count"}, [&] { return json(count); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    json doc = json::object();
    if (!config_path.empty()) {
      try {
        doc = json::parse(read_file(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    if (!command.empty()) doc["command"] = command;
    for (const auto& o : overrides) {
      if (o.opt->count() == 0) continue;
      set_path(doc, o.path, o.value());
    }
    // A strength flag replaces whichever form the file used.
    if (doc.contains("problem") && doc["problem"].is_object()) {
      if (a_opt->count() > 0) doc["problem"].erase("a_over_astar");
      if (rel_opt->count() > 0) doc["problem"].erase("a");
    }
    const RunConfig cfg = parse_config(doc);
    return run(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "rotbec: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AccuracyError& e) {
    std::cerr << "rotbec: accuracy gate: " << e.what() << "\n";
    return kExitAccuracy;
  } catch (const NumericalError& e) {
    std::cerr << "rotbec: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "rotbec: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "rotbec: " << e.what() << "\n";
    return kExitConfig;
  }
}
