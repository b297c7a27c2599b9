#pragma once

#include <optional>
#include <string>
#include <variant>

#include "rotbec/townes.hpp"
#include "rotbec/vec2.hpp"

namespace rotbec {

/// V(x) = |x|^s, s >= 2.
struct PowerTrap {
  double s = 2.0;
};

/// V(x) = |x|^2 + k |x|^q, k >= 0, q > 0.
struct QuarticQuadraticTrap {
  double k = 0.0;
  double q = 4.0;
};

/// V(x) = |x - b|^2.
struct ShiftedHarmonicTrap {
  Vec2 b;
};

using TrapKind = std::variant<PowerTrap, QuarticQuadraticTrap, ShiftedHarmonicTrap>;

class PotentialSpec {
 public:
  /// Validates the family parameters (throws ConfigError).
  explicit PotentialSpec(TrapKind kind, std::string label = {});

  static PotentialSpec harmonic() { return PotentialSpec(PowerTrap{2.0}); }

  [[nodiscard]] const TrapKind& kind() const { return kind_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  /// Short tag used in CSV rows and file headers: "power", "quartic_quadratic", "shifted_harmonic".
  [[nodiscard]] std::string tag() const;

  [[nodiscard]] double operator()(Vec2 x) const;

 private:
  TrapKind kind_;
  std::string label_;
};

/// Either a finite value or +infinity, kept as a tag rather than a large float.
struct ExtendedReal {
  bool infinite = false;
  double value = 0.0;

  static ExtendedReal finite(double v) { return {false, v}; }
  static ExtendedReal infinity() { return {true, 0.0}; }

  /// x < *this
  [[nodiscard]] bool exceeds(double x) const { return infinite || x < value; }
  [[nodiscard]] std::string to_string() const;
};

/// Supremum of rotation speeds for which V(x) - (Omega^2/4)|x|^2 still grows
/// without bound at infinity.
[[nodiscard]] ExtendedReal critical_omega(const PotentialSpec& spec);

/// h(x) = coefficient * |x|^degree, the homogeneous leading part of V_Omega
/// about its minimum.
struct LeadingProfile {
  double degree = 2.0;
  double coefficient = 1.0;

  [[nodiscard]] double operator()(Vec2 x) const;
};

/// Trap together with a rotation speed.
class EffectivePotential {
 public:
  EffectivePotential(PotentialSpec spec, double omega);

  [[nodiscard]] const PotentialSpec& spec() const { return spec_; }
  [[nodiscard]] double omega() const { return omega_; }
  [[nodiscard]] const ExtendedReal& omega_star() const { return omega_star_; }

  /// omega < omega_star.
  [[nodiscard]] bool confining() const { return omega_star_.exceeds(omega_); }

  /// Point where V_Omega attains its minimum for the implemented families
  /// (origin except for the shifted trap, where it is 4b / (4 - Omega^2)).
  [[nodiscard]] Vec2 concentration_point() const;

  /// Homogeneity degree p and gamma = min(p, 2); empty when the leading
  /// profile is degenerate.
  [[nodiscard]] std::optional<double> degree() const;
  [[nodiscard]] std::optional<double> gamma() const;

 private:
  PotentialSpec spec_;
  double omega_;
  ExtendedReal omega_star_;
};

/// V(x) - (Omega^2/4)|x|^2.
[[nodiscard]] double v_omega(const EffectivePotential& eff, Vec2 x);

/// Leading homogeneous profile of V_Omega - min V_Omega about the
/// concentration point (the origin except for the shifted trap).
///
/// Throws RegimeError when Omega >= 2 with a harmonic leading term.
[[nodiscard]] LeadingProfile leading_profile(const EffectivePotential& eff);

/// H(y) = integral of h(x + y) w(x)^2 dx, by quadrature of w sampled on a
/// 512^2 grid of half width 20. Throws DomainError for |y| > 8.
[[nodiscard]] double h_moment(const LeadingProfile& h, Vec2 y, const RadialProfile& profile);

/// Minimizer of H by damped Newton with central differences, started at 0.
[[nodiscard]] Vec2 minimize_h(const LeadingProfile& h, const RadialProfile& profile);

/// The blow-up constant lambda:
///   p < 2 : [ (p/2) H(y0) ]^{1/(2+p)}
///   p = 2 : [ H(y0) + (Omega^2/4) m2 ]^{1/4}
///   p > 2 : [ (Omega^2/4) m2 ]^{1/4}
/// Throws RegimeError when the result is zero (Omega = 0 with p > 2).
[[nodiscard]] double lambda_const(const EffectivePotential& eff, const LeadingProfile& h,
                                  const TownesConstants& townes, double h_at_y0);

/// Convenience: leading profile, y0, and lambda for eff with the default profile.
struct BlowupConstants {
  LeadingProfile h;
  Vec2 y0;
  double h_at_y0 = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
};
[[nodiscard]] BlowupConstants blowup_constants(const EffectivePotential& eff, const Townes& townes = default_townes());

}  // namespace rotbec
