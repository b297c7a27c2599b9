#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rotbec/minimizer.hpp"

namespace rotbec {

/// Phase winding of one plaquette; (i, j) is its lower-left node.
struct Winding {
  int i = 0;
  int j = 0;
  int charge = 0;
};

/// Nonzero plaquette windings over cells whose four corners all exceed
/// amp_floor * max|u|. Phase differences use the principal branch (-pi, pi].
[[nodiscard]] std::vector<Winding> winding_numbers(const Field2D& u, double amp_floor = 0.05);

/// Winding of the phase along the boundary of the node rectangle
/// [i0, i1] x [j0, j1], traversed counterclockwise.
[[nodiscard]] int loop_winding(const Field2D& u, int i0, int j0, int i1, int j1);

/// v(x) = u(scale * x + shift) on `target`, evaluating the trigonometric
/// interpolant of u exactly (separable sums, cost O(n^3)). Points outside the
/// source box see its periodic extension.
[[nodiscard]] Field2D resample_affine(const Field2D& u, const Grid2D& target, double scale, Vec2 shift);

struct RescaleConfig {
  int n = 256;
  double half_width = 12.0;
};

struct BlowupObservables {
  double eps_a = 0.0;
  Vec2 x_a;
  double theta_a = 0.0;           ///< aligning phase in [0, 2 pi)
  double profile_sup_err = 0.0;   ///< sup |e^{i theta} w_a - w / sqrt(a*)|
  double modulus_sup_err = 0.0;   ///< sup ||w_a| - w / sqrt(a*)|
  double imag_l2 = 0.0;           ///< ||I_a||_2
  double imag_h1 = 0.0;           ///< ||I_a||_{H^1}
  double realpart_sup_err = 0.0;  ///< sup |Re(e^{i theta} w_a) - w / sqrt(a*)|
  double orthogonality = 0.0;     ///< integral w I_a
  double rescaled_l2 = 0.0;       ///< ||w_a||_2
  std::vector<Winding> windings;  ///< census of the unscaled field
  std::optional<Field2D> aligned; ///< e^{i theta} w_a on the rescaled grid
};

/// w_a(x) = eps u(eps x + x_a) exp(-i (eps Omega / 2) x . x_a^perp), phase
/// aligned against w / sqrt(a*), on a centered grid of the given size.
/// Throws DomainError when x_a lies within 4 cells of the box edge.
[[nodiscard]] BlowupObservables blowup_rescale(const MinimizeResult& result, double omega,
                                               const Townes& townes = default_townes(),
                                               const RescaleConfig& cfg = {}, double amp_floor = 0.05);

enum class ScalingMode { energy, epsilon };

struct ScalingFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double r_squared = 0.0;
  double predicted_exponent = 0.0;
  double predicted_coefficient = 0.0;
};

struct ScalingPoint {
  double a = 0.0;
  double value = 0.0;
};

/// Least squares of log(value) against log(a* - a) over points with
/// a / a* >= 0.9. Predictions: exponent gamma/(gamma+2) and coefficient
/// (1 + 2/gamma) lambda^2 / a* for energies; 1/(gamma+2) and 1/lambda for
/// lengths. Throws ConfigError with fewer than four usable points.
[[nodiscard]] ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingMode mode, double a_star,
                                     double gamma, double lambda);

/// last <= factor * median(all earlier) + floor.
[[nodiscard]] bool trend_bounded(std::span<const double> values, double factor = 1.5, double floor = 0.0);

struct MuRow {
  double a = 0.0;
  double mu_eps2 = 0.0;
  double one_plus = 0.0;  ///< 1 + mu eps^2
  double eps4 = 0.0;
  double ratio = 0.0;     ///< |1 + mu eps^2| / eps^4
};
struct MuLimitReport {
  std::vector<MuRow> rows;
  bool bounded = false;  ///< trend_bounded over the top four ratios
};
[[nodiscard]] MuLimitReport mu_limit_check(std::span<const SweepPoint> sweep);

struct DriftRow {
  double a = 0.0;
  double scaled = 0.0;  ///< |(x_a - c) / eps_a - y0|
  double absolute = 0.0;  ///< |x_a - c|
};
struct DriftReport {
  std::vector<DriftRow> rows;
  bool pass = false;  ///< final scaled value < 0.05
};
/// c is the concentration point of eff, y0 the minimizer of H.
[[nodiscard]] DriftReport x_a_drift_check(std::span<const SweepPoint> sweep, const EffectivePotential& eff,
                                          Vec2 y0 = {});

/// sup over the rescaled grid of ||w_a^rot| - |w_a^0||, each field rescaled by
/// its own eps_a and x_a.
[[nodiscard]] double compare_nonrotating(const MinimizeResult& rotating, const MinimizeResult& still,
                                         const RescaleConfig& cfg = {});

/// Exact decomposition of eps^2 e_F in the rescaled frame:
///   eps^2 F = bracket + (a* - a)/2 integral |w_a|^4
///           + eps^4 Omega^2/4 integral |x|^2 |w_a|^2
///           + eps^2 integral V_Omega(eps x + x_a) |w_a|^2
///           - eps^2 Omega integral x^perp . (i w_a, grad w_a)
/// with bracket = integral |grad w_a|^2 - (a*/2) integral |w_a|^4 >= 0.
struct EnergyAudit {
  double scaled_energy = 0.0;  ///< eps^2 F from the unscaled field
  double bracket = 0.0;
  double remainder = 0.0;      ///< sum of the other four terms
  double defect = 0.0;         ///< scaled_energy - bracket - remainder
};
[[nodiscard]] EnergyAudit energy_identity_audit(const MinimizeResult& result, const GpProblem& prob,
                                                const RescaleConfig& cfg = {});

}  // namespace rotbec
