#pragma once

#include <iosfwd>
#include <vector>

#include "rotbec/field.hpp"

namespace rotbec {

/// Positive radial ground state w of  w'' + w'/r - w + w^3 = 0  on a uniform
/// radial grid r_k = k h, k = 0..N, with r_N = r_max.
///
/// Values beyond the point where the shooting trajectory stops being reliable
/// are continued with the linear decay solution c K0(r).
struct RadialProfile {
  double h = 0.0;
  double r_max = 0.0;
  std::vector<double> r;
  std::vector<double> w;
  std::vector<double> dw;  ///< w'(r)
  double matched_at = 0.0; ///< radius where the K0 tail takes over

  [[nodiscard]] double w0() const { return w.front(); }

  /// Cubic Hermite interpolation in r (uses the stored derivative, so w'(0)=0
  /// is built in). Returns 0 beyond r_max.
  [[nodiscard]] double value(double radius) const;
  [[nodiscard]] double derivative(double radius) const;
};

/// Integrals of the profile over the plane.
struct TownesConstants {
  double a_star = 0.0;   ///< integral of w^2, the critical interaction strength
  double grad_sq = 0.0;  ///< integral of |grad w|^2
  double m4 = 0.0;       ///< integral of w^4
  double m2 = 0.0;       ///< integral of |x|^2 w^2
  double w0 = 0.0;       ///< w(0)
};

/// Bisection shooting on w(0) with a classical RK4 integrator.
///
/// Requires r_max >= 15, h <= 0.01 and tol <= 1e-10; tol bounds the final
/// width of the w(0) bracket relative to w(0). Throws ConfigError when the
/// initial bracket [2.0, 2.4] does not straddle the ground state and
/// NumericalError when bisection stalls.
[[nodiscard]] RadialProfile solve_townes(double r_max = 20.0, double h = 0.005, double tol = 1e-12);

/// Max over interior nodes of |w'' + w'/r - w + w^3| with fourth-order
/// central differences (w'/r -> w'' at the origin).
[[nodiscard]] double max_ode_residual(const RadialProfile& profile);

/// Checks positivity, strict monotonicity and tail decay below `tail_bound`.
[[nodiscard]] bool profile_invariants_hold(const RadialProfile& profile, double tail_bound = 1e-8);

/// Composite Simpson quadrature with the 2 pi r Jacobian. Throws
/// AccuracyError when the tail at r_max still carries relative mass above
/// 1e-10 (r_max too small).
[[nodiscard]] TownesConstants townes_constants(const RadialProfile& profile);

/// u(x) = w(scale |x - center|) on the grid, real and nonnegative, zero beyond
/// r_max. Requires at least 8 grid points per 1/scale and center inside the box.
[[nodiscard]] Field2D sample_w_2d(const RadialProfile& profile, const Grid2D& grid, Vec2 center, double scale);

/// Two columns (r, w) with 16 significant digits.
void write_profile(std::ostream& os, const RadialProfile& profile);

/// Profile and constants at the default resolution (r_max 20, h 0.005),
/// computed once per process.
struct Townes {
  RadialProfile profile;
  TownesConstants constants;
};
[[nodiscard]] const Townes& default_townes();

}  // namespace rotbec
