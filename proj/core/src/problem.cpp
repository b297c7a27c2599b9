#include "rotbec/problem.hpp"

#include <cmath>
#include <sstream>

#include "rotbec/error.hpp"

namespace rotbec {

std::optional<double> predicted_epsilon(double a, const EffectivePotential& eff, const Townes& townes) {
  const double a_star = townes.constants.a_star;
  if (!(a < a_star) || !eff.confining()) return std::nullopt;
  try {
    const BlowupConstants c = blowup_constants(eff, townes);
    return std::pow(a_star - a, 1.0 / (2.0 + c.gamma)) / c.lambda;
  } catch (const RegimeError&) {
    return std::nullopt;
  }
}

GpProblem make_problem(double a, EffectivePotential eff, std::optional<double> scale, const Townes& townes) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("interaction strength a must be finite and >= 0");
  double s = 1.0;
  if (scale) {
    if (!(*scale > 0.0) || !std::isfinite(*scale)) throw ConfigError("solve_scale must be positive");
    s = *scale;
  } else if (const auto eps = predicted_epsilon(a, eff, townes)) {
    s = std::min(1.0, *eps);
  }
  return GpProblem{a, std::move(eff), s, townes.constants.a_star};
}

bool in_existence_regime(const GpProblem& prob) {
  return prob.a >= 0.0 && prob.a < prob.a_star && prob.eff.confining();
}

void require_existence_regime(const GpProblem& prob, bool unsafe) {
  if (unsafe || in_existence_regime(prob)) return;
  std::ostringstream os;
  os.precision(10);
  os << "no minimizer exists: requires 0 <= a < a* and omega < omega* (a = " << prob.a << ", a* = " << prob.a_star
     << ", omega = " << prob.omega() << ", omega* = " << prob.eff.omega_star().to_string()
     << "); use the trial scan to probe this regime";
  throw RegimeError(os.str());
}

}  // namespace rotbec
