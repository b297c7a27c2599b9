#pragma once

#include "rotbec/field.hpp"
#include "rotbec/problem.hpp"

namespace rotbec {

enum class AccuracyMode { lenient, strict };

/// Boundary-mass thresholds: above `warn` a result is flagged, above the mode
/// limit (1e-8 strict, 1e-5 lenient) evaluation fails with AccuracyError.
inline constexpr double kBoundaryWarn = 1e-8;
inline constexpr double kBoundaryLenient = 1e-5;

struct EnergyBreakdown {
  double kinetic = 0.0;            ///< integral |grad u|^2
  double potential = 0.0;          ///< integral V |u|^2
  double interaction = 0.0;        ///< (a/2) integral |u|^4
  double rotation = 0.0;           ///< Omega integral x^perp . (iu, grad u)
  double total = 0.0;              ///< kinetic + potential - interaction - rotation
  double covariant_kinetic = 0.0;  ///< integral |grad u - i (Omega/2) x^perp u|^2
  double veff = 0.0;               ///< integral V_Omega |u|^2
  double quartic = 0.0;            ///< integral |u|^4
  double mass = 0.0;
  double boundary_mass = 0.0;
  bool boundary_warning = false;
};

/// Hamiltonian application and energy on one grid, with the trap and the
/// coordinate arrays sampled once.
///
/// H u = -Lap u + V u + i Omega x^perp . grad u - a |u|^2 u.
class GpOperator {
 public:
  GpOperator(const Grid2D& grid, const GpProblem& prob);

  [[nodiscard]] const Grid2D& grid() const { return grid_; }
  [[nodiscard]] const GpProblem& problem() const { return prob_; }
  [[nodiscard]] const RVector& trap() const { return trap_; }

  /// Energy terms of u. When `hu` is given it receives H u. When `u_hat` is
  /// given it receives the forward transform of u.
  EnergyBreakdown evaluate(const Field2D& u, CVector* hu = nullptr, CVector* u_hat = nullptr) const;

 private:
  Grid2D grid_;
  GpProblem prob_;
  RVector trap_;
};

/// All terms of the functional. Throws AccuracyError when the boundary mass
/// exceeds the limit of `mode`, NumericalError on a non-finite field.
[[nodiscard]] EnergyBreakdown gp_energy(const Field2D& u, const GpProblem& prob,
                                        AccuracyMode mode = AccuracyMode::lenient);

struct ChemicalPotential {
  double mu = 0.0;        ///< total - (a/2) integral |u|^4
  double residual = 0.0;  ///< || H u - mu u ||_2
};
[[nodiscard]] ChemicalPotential chemical_potential(const Field2D& u, const GpProblem& prob, const EnergyBreakdown& e);

/// Pointwise smoothed modulus gradient integral of |grad |u||^2, with
/// |u| replaced by sqrt(|u|^2 + delta^2).
[[nodiscard]] double modulus_gradient_sq(const Field2D& u, double delta = 1e-14);

/// lhs = integral |grad u|^2 - Omega integral x^perp . (iu, grad u)
///     = covariant kinetic - (Omega^2/4) integral |x|^2 |u|^2
/// rhs = integral |grad |u||^2 - (Omega^2/4) integral |x|^2 |u|^2
struct DiamagneticReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  ///< lhs - rhs = covariant kinetic - integral |grad |u||^2
};
[[nodiscard]] DiamagneticReport diamagnetic_check(const Field2D& u, double omega);

/// F_a(u) - (1 - a/a*) integral |grad |u||^2 - integral V_Omega |u|^2 for a
/// unit-mass u; nonnegative up to discretization error when a < a*.
[[nodiscard]] double energy_lower_bound_check(const Field2D& u, const GpProblem& prob);

/// v(x) = u(x + d) exp(-i (2 Omega / (4 - Omega^2)) x . b^perp), d = 4b/(4 - Omega^2).
///
/// The result lives on the input grid translated by -d, so the samples are
/// moved without interpolation. Requires Omega < 2 (ConfigError) and a phase
/// gradient below half the grid Nyquist wavenumber (DomainError).
[[nodiscard]] Field2D gauge_translate(const Field2D& u, Vec2 b, double omega);

}  // namespace rotbec
