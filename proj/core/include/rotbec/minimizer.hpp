#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rotbec/energy.hpp"
#include "rotbec/error.hpp"

namespace rotbec {

enum class InitKind { gaussian, vortex, random };

/// Initial data, in units of the solve frame (lengths are multiplied by
/// solve_scale). Gaussian and vortex starts sit at the concentration point
/// plus `offset`.
struct InitSpec {
  InitKind kind = InitKind::gaussian;
  double width = 1.0;
  int charge = 1;
  std::uint64_t seed = 0;
  Vec2 offset{};
};

struct MinimizeConfig {
  int n = 256;
  double half_width = 12.0;  ///< solve-frame half width L'
  double dt = 5e-3;          ///< initial step, solve-frame units
  double dt_max = 1.0;       ///< cap for the adaptive step
  double tol = 1e-9;         ///< relative energy decrease per unit step
  long max_steps = 200000;
  double residual_tol = 1e-6;
  InitSpec init;
  AccuracyMode mode = AccuracyMode::lenient;
  bool unsafe = false;       ///< bypass the existence gate
  bool trial_bound = true;   ///< compare against the scaled-profile upper bound
};

struct MinimizeResult {
  explicit MinimizeResult(Field2D f) : field(std::move(f)) {}

  Field2D field;
  EnergyBreakdown breakdown;
  double mu = 0.0;
  double residual = 0.0;
  double eps_a = 0.0;  ///< (integral |grad u|^2)^{-1/2}
  Vec2 x_a;            ///< sub-grid location of max |u|
  long steps = 0;
  bool converged = false;
  std::vector<double> energy_history;  ///< energy before each accepted step
  double final_dt = 0.0;
  int rejected_steps = 0;
  int mass_dt_reductions = 0;
  double max_mass_drift = 0.0;  ///< largest drift before renormalization after the transient
  std::optional<double> trial_energy;
  bool non_global = false;
};

/// Raised when the flow produces non-finite values; carries the last finite
/// state.
class FlowDivergence : public NumericalError {
 public:
  FlowDivergence(const std::string& what, Field2D last) : NumericalError(what), last_(std::move(last)) {}
  [[nodiscard]] const Field2D& last_stable() const { return last_; }

 private:
  Field2D last_;
};

/// Grid used for prob: n points, half width solve_scale * L', centered on the
/// concentration point.
[[nodiscard]] Grid2D solve_grid(const GpProblem& prob, const MinimizeConfig& cfg);

[[nodiscard]] Field2D make_initial(const Grid2D& grid, const GpProblem& prob, const InitSpec& init);

/// Location of max |u|: first maximum in storage order, refined by a
/// three-point parabola through log |u| along each axis.
[[nodiscard]] Vec2 peak_location(const Field2D& u);

/// Energy of the normalized profile (beta/sqrt(a*)) w(beta (x - c)) at the
/// energy-minimizing beta, c the concentration point. Returns (beta, energy).
struct TrialBound {
  double beta = 0.0;
  double energy = 0.0;
};
[[nodiscard]] TrialBound scaled_profile_bound(const Grid2D& grid, const GpProblem& prob,
                                              const Townes& townes = default_townes());

/// Projected preconditioned gradient flow on the unit-mass sphere.
///
/// Step: u <- normalize(u - d), d = P r - Re<u, P r> u, r = H u - <u, H u> u,
/// P = T F^{-1} [1/(1/dt + |k|^2)] F T with T = (1 + dt Vt)^{-1/2} and
/// Vt = V + (Omega^2/2)|x|^2. The step grows by 10% after accepted steps up to
/// dt_max and halves when the energy rises. After ten steps a step whose mass
/// drift before renormalization exceeds 1e-6 is retried with half the step,
/// at most five times.
///
/// Converged when the relative energy decrease stays below tol * dt for 50
/// consecutive steps and ||H u - mu u|| < residual_tol. Throws RegimeError
/// outside the existence regime unless cfg.unsafe, FlowDivergence on
/// non-finite values.
[[nodiscard]] MinimizeResult minimize(const GpProblem& prob, const MinimizeConfig& cfg,
                                      const std::optional<Field2D>& warm_start = std::nullopt);

/// Resamples a field from one solve scale to another:
/// v(x) = (s_old / s_new) u(c + (x - c) s_old / s_new) on the new grid, as a
/// relabeling of the same samples.
[[nodiscard]] Field2D rescale_warm_start(const Field2D& u, const Grid2D& target);

struct SweepPoint {
  SweepPoint(double a_value, MinimizeResult r) : a(a_value), result(std::move(r)) {}

  double a = 0.0;
  MinimizeResult result;
  bool multistart_disagreement = false;
  std::vector<double> start_energies;  ///< filled at the first point only
};

struct SweepHooks {
  /// Returns a stored result for point `index` to skip its solve.
  std::function<std::optional<MinimizeResult>(std::size_t index, const GpProblem&)> load;
  std::function<void(std::size_t index, const SweepPoint&)> store;
};

struct SweepConfig {
  MinimizeConfig minimize;
  std::uint64_t seed = 0;
  int workers = 1;              ///< concurrent multistart solves
  bool multistart = true;
  std::optional<double> solve_scale;  ///< fixed scale instead of the prediction
};

/// Ascending continuation in a. The first point is solved from Gaussian,
/// vortex and two random starts and keeps the lowest energy; later points
/// warm start from the previous field. Non-converged points are kept and
/// flagged.
[[nodiscard]] std::vector<SweepPoint> continuation_sweep(const std::vector<double>& a_values,
                                                         const EffectivePotential& eff, const SweepConfig& cfg,
                                                         const SweepHooks& hooks = {},
                                                         const Townes& townes = default_townes());

// ---------------------------------------------------------------------------
// Trial-family scans

struct TrialRow {
  double tau = 0.0;
  double energy = 0.0;
};

struct TrialScan {
  std::vector<TrialRow> rows;
  double slope = 0.0;  ///< least-squares slope of energy vs tau^2 over the upper half of tau
  double min_energy = 0.0;
};

struct TrialScanConfig {
  int n = 256;
  double box_factor = 12.0;  ///< half width box_factor / tau, at least 2.5
};

/// Smooth cutoff: 1 on |x| <= 1, 0 on |x| >= 2.
[[nodiscard]] double bump_cutoff(double r);

/// Energies of A (tau/||w||) phi(x - x0) w(tau (x - x0)) e^{i Omega x . x0^perp / 2}
/// on a grid centered at x0; A restores unit mass. No existence gate applies.
[[nodiscard]] TrialScan trial_energy_scan(const GpProblem& prob, const std::vector<double>& tau_values, Vec2 x0,
                                          const TrialScanConfig& cfg = {}, const Townes& townes = default_townes());

}  // namespace rotbec
