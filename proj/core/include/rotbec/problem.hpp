#pragma once

#include <optional>

#include "rotbec/potential.hpp"
#include "rotbec/townes.hpp"

namespace rotbec {

/// Interaction strength, rotating trap and the length scale used to size the
/// solve grid. A solve grid has half width solve_scale * L', so the condensate
/// spans a fixed number of cells whatever its physical width.
struct GpProblem {
  double a = 0.0;
  EffectivePotential eff;
  double solve_scale = 1.0;
  double a_star = 0.0;

  [[nodiscard]] double omega() const { return eff.omega(); }
  [[nodiscard]] const PotentialSpec& trap() const { return eff.spec(); }
};

/// Predicted blow-up length (a* - a)^{1/(2+gamma)} / lambda, or empty outside
/// the regime where it is defined (a >= a*, degenerate profile, lambda = 0).
[[nodiscard]] std::optional<double> predicted_epsilon(double a, const EffectivePotential& eff,
                                                      const Townes& townes = default_townes());

/// Builds a problem whose solve_scale is min(1, predicted epsilon), or 1 when
/// no prediction exists. An explicit positive `scale` overrides the rule.
[[nodiscard]] GpProblem make_problem(double a, EffectivePotential eff, std::optional<double> scale = std::nullopt,
                                     const Townes& townes = default_townes());

/// True when 0 <= a < a* and omega < omega*.
[[nodiscard]] bool in_existence_regime(const GpProblem& prob);

/// Throws RegimeError unless in_existence_regime(prob) or `unsafe` is set.
void require_existence_regime(const GpProblem& prob, bool unsafe);

}  // namespace rotbec
