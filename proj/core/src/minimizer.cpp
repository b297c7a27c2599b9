#include "rotbec/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "rotbec/error.hpp"

namespace rotbec {

namespace {

constexpr double kDescentSlack = 1e-12;
constexpr double kMaxMassDrift = 1e-6;
constexpr int kTransientSteps = 10;
constexpr int kMaxDriftRetries = 5;
constexpr int kQuietStepsNeeded = 50;

void validate(const MinimizeConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cfg.dt_max >= cfg.dt)) throw ConfigError("dt_max must be at least dt");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (!(cfg.residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
  if (!(cfg.half_width > 0.0)) throw ConfigError("half width must be positive");
}

double re_inner(const CVector& u, const CVector& v, double da) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k].real() * v[k].real() + u[k].imag() * v[k].imag();
  return s * da;
}

// Applies the combined preconditioner to r in place.
class Preconditioner {
 public:
  Preconditioner(const Grid2D& grid, const GpOperator& op, double omega)
      : grid_(grid), fft_(grid.n()), vt_(grid.size()), ksq_(grid.wavenumbers().size()) {
    const int n = grid.n();
    // The Nyquist bin keeps its full weight here: with a zero weight, the
    // position-dependent scaling below feeds it undamped and the step blows up.
    for (int i = 0; i < n; ++i) {
      const double k = i == n / 2 ? std::numbers::pi / grid.dx() : grid.wavenumber(i);
      ksq_[static_cast<std::size_t>(i)] = k * k;
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = grid.index(i, j);
        vt_[idx] = std::max(0.0, op.trap()[idx]) + 0.5 * omega * omega * grid.point(i, j).norm_sq();
      }
    }
  }

  void apply(CVector& r, double dt) const {
    for (std::size_t k = 0; k < r.size(); ++k) r[k] /= std::sqrt(1.0 + dt * vt_[k]);
    fft_.forward_in_place(r);
    const int n = grid_.n();
    for (int j = 0; j < n; ++j) {
      const double ky2 = ksq_[static_cast<std::size_t>(j)];
      for (int i = 0; i < n; ++i) {
        r[grid_.index(i, j)] *= dt / (1.0 + dt * (ksq_[static_cast<std::size_t>(i)] + ky2));
      }
    }
    fft_.inverse_in_place(r);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] /= std::sqrt(1.0 + dt * vt_[k]);
  }

 private:
  Grid2D grid_;
  Fft2D fft_;
  RVector vt_;
  RVector ksq_;
};

void check_resolution(const Grid2D& grid, const GpProblem& prob) {
  if (const auto eps = predicted_epsilon(prob.a, prob.eff)) {
    if (*eps / grid.dx() < 8.0) {
      std::ostringstream os;
      os << "grid spacing " << grid.dx() << " does not resolve the predicted width " << *eps
         << " with 8 points; reduce L or raise n";
      throw ConfigError(os.str());
    }
  }
}

}  // namespace

Grid2D solve_grid(const GpProblem& prob, const MinimizeConfig& cfg) {
  return Grid2D(cfg.n, prob.solve_scale * cfg.half_width, prob.eff.concentration_point());
}

Field2D make_initial(const Grid2D& grid, const GpProblem& prob, const InitSpec& init) {
  const double s = prob.solve_scale;
  switch (init.kind) {
    case InitKind::gaussian:
      return gaussian_init(grid, init.width * s, grid.center() + s * init.offset);
    case InitKind::vortex:
      return vortex_init(grid, init.charge, init.width * s);
    case InitKind::random:
      return random_init(grid, init.seed);
  }
  throw ConfigError("unknown initializer");
}

Vec2 peak_location(const Field2D& u) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  std::size_t best = 0;
  double best_val = -1.0;
  const auto& v = u.data();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double m = std::norm(v[k]);
    if (m > best_val) {
      best_val = m;
      best = k;
    }
  }
  const int i = static_cast<int>(best % static_cast<std::size_t>(n));
  const int j = static_cast<int>(best / static_cast<std::size_t>(n));
  auto refine = [&](double lm, double l0, double lp) {
    const double den = lm - 2.0 * l0 + lp;
    if (!(den < 0.0)) return 0.0;
    return std::clamp(0.5 * (lm - lp) / den, -0.5, 0.5);
  };
  auto logabs = [&](int ii, int jj) { return 0.5 * std::log(std::max(std::norm(u.at(ii, jj)), 1e-300)); };
  double dx = 0.0, dy = 0.0;
  if (i > 0 && i < n - 1) dx = refine(logabs(i - 1, j), logabs(i, j), logabs(i + 1, j));
  if (j > 0 && j < n - 1) dy = refine(logabs(i, j - 1), logabs(i, j), logabs(i, j + 1));
  return {g.x(i) + dx * g.dx(), g.y(j) + dy * g.dx()};
}

TrialBound scaled_profile_bound(const Grid2D& grid, const GpProblem& prob, const Townes& townes) {
  const GpOperator op(grid, prob);
  const Vec2 c = prob.eff.concentration_point();
  const double half_omega = 0.5 * prob.omega();
  const Vec2 cp = c.perp();
  auto energy = [&](double beta) {
    Field2D u = sample_w_2d(townes.profile, grid, c, beta);
    auto& d = u.data_mut();
    const int n = grid.n();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) d[grid.index(i, j)] *= std::polar(1.0, half_omega * grid.point(i, j).dot(cp));
    }
    normalize_in_place(u);
    return op.evaluate(u).total;
  };
  // Golden section in log(beta) between "fits in the box" and "resolved by 8 cells".
  double lo = std::log(8.0 / grid.half_width());
  double hi = std::log(1.0 / (8.0 * grid.dx()));
  if (!(hi > lo)) throw ConfigError("scaled_profile_bound: grid too coarse for the box");
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = energy(std::exp(x1)), f2 = energy(std::exp(x2));
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = energy(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = energy(std::exp(x2));
    }
  }
  return f1 < f2 ? TrialBound{std::exp(x1), f1} : TrialBound{std::exp(x2), f2};
}

Field2D rescale_warm_start(const Field2D& u, const Grid2D& target) {
  if (u.grid().n() != target.n()) throw ConfigError("warm start must use the same number of grid points");
  const double ratio = u.grid().half_width() / target.half_width();
  CVector values(u.data());
  for (auto& z : values) z *= ratio;
  return Field2D(target, std::move(values));
}

MinimizeResult minimize(const GpProblem& prob, const MinimizeConfig& cfg, const std::optional<Field2D>& warm_start) {
  validate(cfg);
  require_existence_regime(prob, cfg.unsafe);
  const Grid2D grid = solve_grid(prob, cfg);
  check_resolution(grid, prob);

  Field2D u = warm_start ? (warm_start->grid() == grid ? *warm_start : rescale_warm_start(*warm_start, grid))
                         : make_initial(grid, prob, cfg.init);
  if (!u.all_finite()) throw ConfigError("initial field has non-finite samples");
  normalize_in_place(u);

  const GpOperator op(grid, prob);
  const Preconditioner precond(grid, op, prob.omega());
  const double s2 = prob.solve_scale * prob.solve_scale;
  const double da = grid.cell_area();

  MinimizeResult res(u);
  double dt = cfg.dt;
  double dt_used = dt;
  std::optional<Field2D> prev;
  double e_prev = 0.0;
  int quiet = 0;
  bool reverted = false;
  CVector hu, r;
  EnergyBreakdown e;
  double residual = std::numeric_limits<double>::infinity();

  long step = 0;
  for (; step < cfg.max_steps; ++step) {
    e = op.evaluate(u, &hu);
    if (!std::isfinite(e.total) || !u.all_finite()) {
      throw FlowDivergence("gradient flow produced non-finite values; reduce dt", prev ? *prev : u);
    }
    if (prev && e.total > e_prev + kDescentSlack) {
      u = *prev;
      prev.reset();
      reverted = true;
      dt *= 0.5;
      ++res.rejected_steps;
      quiet = 0;
      if (dt < 1e-12 * cfg.dt) throw NumericalError("gradient flow step collapsed while the energy kept rising");
      continue;
    }
    if (prev) {
      const double rel = (e_prev - e.total) / std::max(std::abs(e.total), 1e-300);
      quiet = rel < cfg.tol * dt_used ? quiet + 1 : 0;
    }
    // A reverted state was already recorded.
    if (!reverted) res.energy_history.push_back(e.total);
    reverted = false;

    const auto& v = u.data();
    const double mu = re_inner(v, hu, da);
    r.resize(v.size());
    double r2 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      r[k] = hu[k] - mu * v[k];
      r2 += std::norm(r[k]);
    }
    residual = std::sqrt(r2 * da);
    if (quiet >= kQuietStepsNeeded && residual < cfg.residual_tol) {
      res.converged = true;
      break;
    }

    // Descent direction, retried with smaller steps while the mass drift is too large.
    CVector d;
    Field2D next = u;
    for (int attempt = 0;; ++attempt) {
      d = r;
      precond.apply(d, dt * s2);
      const double beta = re_inner(v, d, da);
      auto& nv = next.data_mut();
      for (std::size_t k = 0; k < v.size(); ++k) nv[k] = v[k] - (d[k] - beta * v[k]);
      const double drift = std::abs(next.mass() - 1.0);
      const bool past_transient = step >= kTransientSteps;
      if (past_transient && drift > kMaxMassDrift && attempt < kMaxDriftRetries) {
        dt *= 0.5;
        ++res.mass_dt_reductions;
        continue;
      }
      if (past_transient) res.max_mass_drift = std::max(res.max_mass_drift, drift);
      break;
    }
    prev = std::move(u);
    e_prev = e.total;
    dt_used = dt;
    u = std::move(next);
    normalize_in_place(u);
    dt = std::min(dt * 1.1, cfg.dt_max);
  }

  res.field = u;
  res.steps = step;
  res.final_dt = dt;
  res.breakdown = gp_energy(u, prob, cfg.mode);
  const ChemicalPotential cp = chemical_potential(u, prob, res.breakdown);
  res.mu = cp.mu;
  res.residual = cp.residual;
  res.eps_a = 1.0 / std::sqrt(res.breakdown.kinetic);
  res.x_a = peak_location(u);
  if (cfg.trial_bound && in_existence_regime(prob)) {
    try {
      const TrialBound tb = scaled_profile_bound(grid, prob);
      res.trial_energy = tb.energy;
      res.non_global = res.breakdown.total > tb.energy + 0.005 * std::abs(tb.energy);
    } catch (const ConfigError&) {
      // Grid too coarse for the profile family: no bound available.
    }
  }
  return res;
}

std::vector<SweepPoint> continuation_sweep(const std::vector<double>& a_values, const EffectivePotential& eff,
                                           const SweepConfig& cfg, const SweepHooks& hooks, const Townes& townes) {
  if (a_values.empty()) throw ConfigError("sweep needs at least one interaction strength");
  for (std::size_t k = 0; k < a_values.size(); ++k) {
    if (!(a_values[k] >= 0.0)) throw ConfigError("sweep values must be nonnegative");
    if (k > 0 && !(a_values[k] > a_values[k - 1])) throw ConfigError("sweep values must be strictly ascending");
  }
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");

  std::vector<SweepPoint> out;
  out.reserve(a_values.size());
  for (std::size_t idx = 0; idx < a_values.size(); ++idx) {
    const GpProblem prob = make_problem(a_values[idx], eff, cfg.solve_scale, townes);
    require_existence_regime(prob, cfg.minimize.unsafe);
    SweepPoint point(a_values[idx], MinimizeResult(Field2D(solve_grid(prob, cfg.minimize))));

    std::optional<MinimizeResult> loaded;
    if (hooks.load) loaded = hooks.load(idx, prob);
    if (loaded) {
      point.result = std::move(*loaded);
      out.push_back(std::move(point));
      continue;
    }

    if (out.empty() && cfg.multistart) {
      SplitMix64 root(cfg.seed);
      std::vector<InitSpec> starts(4, cfg.minimize.init);
      starts[0].kind = InitKind::gaussian;
      starts[1].kind = InitKind::vortex;
      starts[1].charge = 1;
      starts[2].kind = InitKind::random;
      starts[2].seed = root.next();
      starts[3].kind = InitKind::random;
      starts[3].seed = root.next();
      std::vector<MinimizeResult> results;
      auto run = [&](const InitSpec& init) {
        MinimizeConfig c = cfg.minimize;
        c.init = init;
        return minimize(prob, c);
      };
      if (cfg.workers > 1) {
        std::vector<std::future<MinimizeResult>> jobs;
        for (std::size_t s = 0; s < starts.size(); ++s) {
          if (jobs.size() >= static_cast<std::size_t>(cfg.workers)) {
            results.push_back(jobs.front().get());
            jobs.erase(jobs.begin());
          }
          jobs.push_back(std::async(std::launch::async, run, starts[s]));
        }
        for (auto& j : jobs) results.push_back(j.get());
      } else {
        for (const auto& s : starts) results.push_back(run(s));
      }
      std::size_t best = 0;
      for (std::size_t s = 0; s < results.size(); ++s) {
        point.start_energies.push_back(results[s].breakdown.total);
        if (results[s].breakdown.total < results[best].breakdown.total) best = s;
      }
      const double lo = results[best].breakdown.total;
      for (const auto& rr : results) {
        if (rr.breakdown.total - lo > 0.005 * std::abs(lo)) point.multistart_disagreement = true;
      }
      point.result = std::move(results[best]);
    } else if (out.empty()) {
      point.result = minimize(prob, cfg.minimize);
    } else {
      const Grid2D grid = solve_grid(prob, cfg.minimize);
      point.result = minimize(prob, cfg.minimize, rescale_warm_start(out.back().result.field, grid));
    }
    if (hooks.store) hooks.store(idx, point);
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace rotbec
