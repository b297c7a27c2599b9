#include "rotbec/potential.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "rotbec/error.hpp"

namespace rotbec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kDegreeTol = 1e-12;

}  // namespace

PotentialSpec::PotentialSpec(TrapKind kind, std::string label) : kind_(kind), label_(std::move(label)) {
  std::visit(overloaded{
                 [](const PowerTrap& t) {
                   if (!(t.s >= 2.0) || !std::isfinite(t.s)) throw ConfigError("power trap requires exponent s >= 2");
                 },
                 [](const QuarticQuadraticTrap& t) {
                   if (!(t.k >= 0.0) || !std::isfinite(t.k)) throw ConfigError("quartic_quadratic trap requires k >= 0");
                   if (!(t.q > 0.0) || !std::isfinite(t.q)) throw ConfigError("quartic_quadratic trap requires q > 0");
                 },
                 [](const ShiftedHarmonicTrap& t) {
                   if (!std::isfinite(t.b.x) || !std::isfinite(t.b.y))
                     throw ConfigError("shifted_harmonic trap requires a finite center");
                 },
             },
             kind_);
  if (label_.empty()) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const PowerTrap& t) { os << "power:" << t.s; },
                   [&](const QuarticQuadraticTrap& t) { os << "quartic_quadratic:" << t.k << ',' << t.q; },
                   [&](const ShiftedHarmonicTrap& t) { os << "shifted_harmonic:" << t.b.x << ',' << t.b.y; },
               },
               kind_);
    label_ = os.str();
  }
}

std::string PotentialSpec::tag() const {
  return std::visit(overloaded{
                        [](const PowerTrap&) { return std::string("power"); },
                        [](const QuarticQuadraticTrap&) { return std::string("quartic_quadratic"); },
                        [](const ShiftedHarmonicTrap&) { return std::string("shifted_harmonic"); },
                    },
                    kind_);
}

double PotentialSpec::operator()(Vec2 x) const {
  return std::visit(overloaded{
                        [&](const PowerTrap& t) {
                          const double r2 = x.norm_sq();
                          return t.s == 2.0 ? r2 : std::pow(r2, 0.5 * t.s);
                        },
                        [&](const QuarticQuadraticTrap& t) {
                          const double r2 = x.norm_sq();
                          return r2 + t.k * std::pow(r2, 0.5 * t.q);
                        },
                        [&](const ShiftedHarmonicTrap& t) { return (x - t.b).norm_sq(); },
                    },
                    kind_);
}

std::string ExtendedReal::to_string() const {
  if (infinite) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

ExtendedReal critical_omega(const PotentialSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerTrap& t) { return t.s > 2.0 ? ExtendedReal::infinity() : ExtendedReal::finite(2.0); },
                        [](const QuarticQuadraticTrap& t) {
                          if (t.k == 0.0 || t.q < 2.0) return ExtendedReal::finite(2.0);
                          if (t.q == 2.0) return ExtendedReal::finite(2.0 * std::sqrt(1.0 + t.k));
                          return ExtendedReal::infinity();
                        },
                        [](const ShiftedHarmonicTrap&) { return ExtendedReal::finite(2.0); },
                    },
                    spec.kind());
}

double LeadingProfile::operator()(Vec2 x) const {
  const double r2 = x.norm_sq();
  if (std::abs(degree - 2.0) < kDegreeTol) return coefficient * r2;
  return coefficient * std::pow(r2, 0.5 * degree);
}

EffectivePotential::EffectivePotential(PotentialSpec spec, double omega)
    : spec_(std::move(spec)), omega_(omega), omega_star_(critical_omega(spec_)) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("rotation speed must be finite and >= 0");
}

Vec2 EffectivePotential::concentration_point() const {
  if (const auto* t = std::get_if<ShiftedHarmonicTrap>(&spec_.kind())) {
    if (!confining()) return {};
    return (4.0 / (4.0 - omega_ * omega_)) * t->b;
  }
  return {};
}

std::optional<double> EffectivePotential::degree() const {
  try {
    return leading_profile(*this).degree;
  } catch (const RegimeError&) {
    return std::nullopt;
  }
}

std::optional<double> EffectivePotential::gamma() const {
  const auto p = degree();
  if (!p) return std::nullopt;
  return std::min(*p, 2.0);
}

double v_omega(const EffectivePotential& eff, Vec2 x) {
  return eff.spec()(x) - 0.25 * eff.omega() * eff.omega() * x.norm_sq();
}

LeadingProfile leading_profile(const EffectivePotential& eff) {
  const double w2 = 0.25 * eff.omega() * eff.omega();
  auto harmonic = [&](double c) {
    if (!(c - w2 > 0.0)) {
      std::ostringstream os;
      os << "leading profile degenerate: harmonic coefficient " << c << " does not exceed Omega^2/4 = " << w2;
      throw RegimeError(os.str());
    }
    return LeadingProfile{2.0, c - w2};
  };
  return std::visit(overloaded{
                        [&](const PowerTrap& t) {
                          if (t.s == 2.0) return harmonic(1.0);
                          return LeadingProfile{t.s, 1.0};
                        },
                        [&](const QuarticQuadraticTrap& t) {
                          if (t.k == 0.0 || t.q > 2.0) return harmonic(1.0);
                          if (t.q == 2.0) return harmonic(1.0 + t.k);
                          if (!(eff.omega() < 2.0)) throw RegimeError("leading profile degenerate: Omega >= Omega* = 2");
                          return LeadingProfile{t.q, t.k};
                        },
                        [&](const ShiftedHarmonicTrap&) { return harmonic(1.0); },
                    },
                    eff.spec().kind());
}

namespace {

struct WeightGrid {
  std::vector<Vec2> points;
  std::vector<double> weights;  // w^2 dA
};

WeightGrid weight_grid(const RadialProfile& profile) {
  const Grid2D grid(512, 20.0);
  WeightGrid g;
  g.points.reserve(grid.size());
  g.weights.reserve(grid.size());
  const double da = grid.cell_area();
  for (int j = 0; j < grid.n(); ++j) {
    for (int i = 0; i < grid.n(); ++i) {
      const Vec2 p = grid.point(i, j);
      const double w = profile.value(p.norm());
      if (w == 0.0) continue;
      g.points.push_back(p);
      g.weights.push_back(w * w * da);
    }
  }
  return g;
}

double h_moment_on(const LeadingProfile& h, Vec2 y, const WeightGrid& g) {
  if (y.norm() > 8.0) throw DomainError("h_moment: shift |y| exceeds the quadrature domain");
  double s = 0.0;
  for (std::size_t k = 0; k < g.points.size(); ++k) s += h(g.points[k] + y) * g.weights[k];
  return s;
}

}  // namespace

double h_moment(const LeadingProfile& h, Vec2 y, const RadialProfile& profile) {
  return h_moment_on(h, y, weight_grid(profile));
}

Vec2 minimize_h(const LeadingProfile& h, const RadialProfile& profile) {
  const WeightGrid g = weight_grid(profile);
  auto H = [&](Vec2 y) { return h_moment_on(h, y, g); };
  constexpr double d = 0.05;
  Vec2 y{};
  double f = H(y);
  for (int it = 0; it < 50; ++it) {
    const double fxp = H(y + Vec2{d, 0}), fxm = H(y - Vec2{d, 0});
    const double fyp = H(y + Vec2{0, d}), fym = H(y - Vec2{0, d});
    const double fpp = H(y + Vec2{d, d}), fpm = H(y + Vec2{d, -d});
    const double fmp = H(y + Vec2{-d, d}), fmm = H(y + Vec2{-d, -d});
    const double gx = (fxp - fxm) / (2 * d);
    const double gy = (fyp - fym) / (2 * d);
    if (std::hypot(gx, gy) < 1e-10 * std::max(1.0, std::abs(f))) break;
    const double hxx = (fxp - 2 * f + fxm) / (d * d);
    const double hyy = (fyp - 2 * f + fym) / (d * d);
    const double hxy = (fpp - fpm - fmp + fmm) / (4 * d * d);
    const double det = hxx * hyy - hxy * hxy;
    Vec2 step;
    if (det > 0.0 && hxx > 0.0) {
      step = {-(hyy * gx - hxy * gy) / det, -(-hxy * gx + hxx * gy) / det};
    } else {
      step = {-gx, -gy};
    }
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec2 trial = y + t * step;
      if (trial.norm() <= 8.0) {
        const double ft = H(trial);
        if (ft < f) {
          y = trial;
          f = ft;
          improved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!improved || t * step.norm() < 1e-12) break;
  }
  return y;
}

double lambda_const(const EffectivePotential& eff, const LeadingProfile& h, const TownesConstants& townes,
                    double h_at_y0) {
  const double p = h.degree;
  const double w2 = 0.25 * eff.omega() * eff.omega();
  double lambda = 0.0;
  if (std::abs(p - 2.0) < kDegreeTol) {
    lambda = std::pow(h_at_y0 + w2 * townes.m2, 0.25);
  } else if (p < 2.0) {
    lambda = std::pow(0.5 * p * h_at_y0, 1.0 / (2.0 + p));
  } else {
    lambda = std::pow(w2 * townes.m2, 0.25);
  }
  if (!(lambda > 0.0)) throw RegimeError("lambda is zero: Omega = 0 with degree p > 2 lies outside the blow-up regime");
  return lambda;
}

BlowupConstants blowup_constants(const EffectivePotential& eff, const Townes& townes) {
  BlowupConstants c;
  c.h = leading_profile(eff);
  if (std::abs(c.h.degree - 2.0) < kDegreeTol) {
    // Radial quadratic h: H(y) = c (m2 + a* |y|^2) is minimized at 0.
    c.y0 = {};
    c.h_at_y0 = c.h.coefficient * townes.constants.m2;
  } else {
    c.y0 = minimize_h(c.h, townes.profile);
    c.h_at_y0 = h_moment(c.h, c.y0, townes.profile);
  }
  c.lambda = lambda_const(eff, c.h, townes.constants, c.h_at_y0);
  c.gamma = std::min(c.h.degree, 2.0);
  return c;
}

}  // namespace rotbec
