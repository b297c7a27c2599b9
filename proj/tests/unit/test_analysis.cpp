#include <gtest/gtest.h>

#include <cmath>
#include <array>

#include "oracles.hpp"
#include "rotbec/analysis.hpp"
#include "rotbec/error.hpp"

using namespace rotbec;
using oracle::cplx;

namespace {

const Townes& townes() { return default_townes(); }

// Exact blow-up profile tau w(tau (x - x0)) / sqrt(a*) carrying the rotation
// gauge phase about x0 and a global phase.
MinimizeResult synthetic_blowup(double tau, Vec2 x0, double omega, double phase) {
  const Grid2D g(256, 6.0);
  Field2D u = sample_w_2d(townes().profile, g, x0, tau);
  const Vec2 x0p = x0.perp();
  auto& d = u.data_mut();
  for (int j = 0; j < g.n(); ++j) {
    for (int i = 0; i < g.n(); ++i) {
      d[g.index(i, j)] *= std::polar(tau / std::sqrt(townes().constants.a_star), 0.5 * omega * g.point(i, j).dot(x0p) + phase);
    }
  }
  MinimizeResult r(u);
  r.eps_a = 1.0 / tau;
  r.x_a = x0;
  return r;
}

// Vortices at the given points with the given charges, under a Gaussian.
Field2D vortex_lattice(const Grid2D& g, const std::vector<std::pair<Vec2, int>>& cores) {
  return oracle::tabulate(g, [&](double x, double y) {
    cplx z = std::exp(-0.05 * (x * x + y * y));
    for (const auto& [c, q] : cores) {
      const cplx f(x - c.x, y - c.y);
      z *= q > 0 ? std::pow(f, q) : std::pow(std::conj(f), -q);
    }
    return z;
  });
}

SweepPoint point(double a, double eps, double mu, Vec2 x_a) {
  MinimizeResult r(Field2D(Grid2D(64, 4.0)));
  r.eps_a = eps;
  r.mu = mu;
  r.x_a = x_a;
  return {a, std::move(r)};
}

}  // namespace

TEST(BlowupRescale, RecoversExactProfile) {
  const double omega = 1.0;
  const MinimizeResult r = synthetic_blowup(2.0, {0.4, -0.3}, omega, 0.7);
  const BlowupObservables obs = blowup_rescale(r, omega, townes(), {256, 10.0});
  EXPECT_LT(obs.profile_sup_err, 2e-3);
  EXPECT_LT(obs.modulus_sup_err, 2e-3);
  EXPECT_LT(obs.imag_l2, 1e-3);
  EXPECT_NEAR(obs.rescaled_l2, 1.0, 1e-3);
  EXPECT_NEAR(std::remainder(obs.theta_a + 0.7, 2 * oracle::pi), 0.0, 1e-6);
  EXPECT_TRUE(obs.windings.empty());
  ASSERT_TRUE(obs.aligned.has_value());
}

TEST(BlowupRescale, AlignmentPhaseIsOptimal) {
  const MinimizeResult r = synthetic_blowup(1.5, {}, 0.0, 2.0);
  const BlowupObservables obs = blowup_rescale(r, 0.0, townes(), {256, 10.0});
  Field2D ref = sample_w_2d(townes().profile, obs.aligned->grid(), {}, 1.0);
  ref.scale(1.0 / std::sqrt(townes().constants.a_star));
  const double at = phase_aligned_distance(*obs.aligned, ref).distance;
  auto dist = [&](double dtheta) {
    const Field2D v = phase_rotate(*obs.aligned, dtheta);
    double s = 0.0;
    for (std::size_t k = 0; k < v.data().size(); ++k) s += std::norm(v.data()[k] - ref.data()[k]);
    return std::sqrt(s * v.grid().cell_area());
  };
  EXPECT_NEAR(dist(0.0), at, 1e-9);
  EXPECT_GT(dist(0.01), at);
  EXPECT_GT(dist(-0.01), at);
}

TEST(BlowupRescale, RejectsPeakAtEdge) {
  MinimizeResult r = synthetic_blowup(2.0, {}, 0.0, 0.0);
  r.x_a = {5.95, 0.0};
  EXPECT_THROW((void)blowup_rescale(r, 0.0), DomainError);
}

TEST(ResampleAffine, ExactOnTrigonometricPolynomials) {
  const Grid2D src(64, 4.0);
  const double dk = oracle::pi / 4.0;
  auto f = [&](double x, double y) { return std::polar(1.0, 3 * dk * x - 5 * dk * y) + 0.5 * std::cos(2 * dk * y); };
  const Field2D u = oracle::tabulate(src, f);
  const Grid2D dst(64, 3.0);
  const double scale = 0.7;
  const Vec2 shift{0.31, -0.17};
  const Field2D v = resample_affine(u, dst, scale, shift);
  double err = 0.0;
  for (int j = 0; j < dst.n(); ++j) {
    for (int i = 0; i < dst.n(); ++i) {
      err = std::max(err, std::abs(v.at(i, j) - f(scale * dst.x(i) + shift.x, scale * dst.y(j) + shift.y)));
    }
  }
  EXPECT_LT(err, 1e-11);
}

TEST(Winding, RealFieldHasNoVortices) {
  EXPECT_TRUE(winding_numbers(gaussian_init(Grid2D(128, 8.0), 1.5)).empty());
}

TEST(Winding, CensusIsGaugeInvariant) {
  const Grid2D g(128, 8.0);
  const Field2D u = vortex_lattice(g, {{{1.03, 0.51}, 1}, {{-2.02, -1.47}, 1}, {{0.49, -2.53}, -1}});
  const auto base = winding_numbers(u, 1e-3);
  ASSERT_EQ(base.size(), 3u);
  Field2D v = phase_rotate(u, 1.1);
  auto& d = v.data_mut();
  for (int j = 0; j < g.n(); ++j) {
    for (int i = 0; i < g.n(); ++i) d[g.index(i, j)] *= std::polar(1.0, 0.3 * g.x(i) - 0.2 * g.y(j));
  }
  const auto gauged = winding_numbers(v, 1e-3);
  ASSERT_EQ(gauged.size(), base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    EXPECT_EQ(gauged[k].i, base[k].i);
    EXPECT_EQ(gauged[k].j, base[k].j);
    EXPECT_EQ(gauged[k].charge, base[k].charge);
  }
}

TEST(Winding, PlaquetteChargesSumToLoopWinding) {
  const Grid2D g(128, 8.0);
  const Field2D u = vortex_lattice(g, {{{1.03, 0.51}, 1}, {{-2.02, -1.47}, 1}, {{0.49, -2.53}, -1}});
  const auto w = winding_numbers(u, 1e-3);
  auto inside = [&](int i0, int j0, int i1, int j1) {
    int s = 0;
    for (const auto& c : w) {
      if (c.i >= i0 && c.i < i1 && c.j >= j0 && c.j < j1) s += c.charge;
    }
    return s;
  };
  for (auto [i0, j0, i1, j1] : {std::array{40, 40, 90, 90}, std::array{64, 64, 90, 90}, std::array{60, 30, 80, 60}}) {
    EXPECT_EQ(loop_winding(u, i0, j0, i1, j1), inside(i0, j0, i1, j1));
  }
  EXPECT_EQ(loop_winding(u, 40, 40, 90, 90), 1);
  EXPECT_THROW((void)loop_winding(u, 10, 10, 5, 20), ConfigError);
  EXPECT_THROW((void)winding_numbers(u, 0.7), ConfigError);
}

TEST(FitScaling, ExactPowerLaw) {
  const double a_star = townes().constants.a_star;
  std::vector<ScalingPoint> pts;
  for (double f : {0.5, 0.9, 0.93, 0.96, 0.98, 0.995}) pts.push_back({f * a_star, 1.7 * std::pow(a_star - f * a_star, 0.5)});
  const ScalingFit fit = fit_scaling(pts, ScalingMode::energy, a_star, 2.0, 1.9);
  EXPECT_NEAR(fit.exponent, 0.5, 1e-12);
  EXPECT_NEAR(fit.coefficient, 1.7, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(fit.predicted_exponent, 0.5);
  EXPECT_DOUBLE_EQ(fit.predicted_coefficient, 2.0 * 1.9 * 1.9 / a_star);
  const ScalingFit len = fit_scaling(pts, ScalingMode::epsilon, a_star, 2.0, 1.9);
  EXPECT_DOUBLE_EQ(len.predicted_exponent, 0.25);
  EXPECT_DOUBLE_EQ(len.predicted_coefficient, 1.0 / 1.9);
}

TEST(FitScaling, NeedsFourPointsNearCritical) {
  const double a_star = townes().constants.a_star;
  const std::vector<ScalingPoint> pts{{0.5 * a_star, 1}, {0.91 * a_star, 1}, {0.95 * a_star, 1}, {0.99 * a_star, 1}};
  EXPECT_THROW((void)fit_scaling(pts, ScalingMode::energy, a_star, 2, 1), ConfigError);
}

TEST(TrendBounded, ComparesAgainstEarlierMedian) {
  EXPECT_TRUE(trend_bounded(std::vector<double>{1, 2, 3, 3}));
  EXPECT_FALSE(trend_bounded(std::vector<double>{1, 1, 1, 2}));
  EXPECT_TRUE(trend_bounded(std::vector<double>{1, 1, 1, 2}, 1.5, 0.5));
  EXPECT_THROW((void)trend_bounded(std::vector<double>{1}), ConfigError);
}

TEST(Reports, ChemicalPotentialLimit) {
  // mu eps^2 = -1 + 2 eps^4 gives ratio 2 at every point.
  std::vector<SweepPoint> sweep;
  for (double eps : {0.5, 0.4, 0.3, 0.2, 0.1}) {
    const double e2 = eps * eps;
    sweep.push_back(point(1.0, eps, (-1.0 + 2.0 * e2 * e2) / e2, {}));
  }
  const MuLimitReport rep = mu_limit_check(sweep);
  ASSERT_EQ(rep.rows.size(), 5u);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.ratio, 2.0, 1e-9);
  EXPECT_TRUE(rep.bounded);
}

TEST(Reports, PeakDrift) {
  const EffectivePotential eff(PotentialSpec(ShiftedHarmonicTrap{{0.75, 0.0}}), 1.0);
  const Vec2 c = eff.concentration_point();
  std::vector<SweepPoint> sweep;
  sweep.push_back(point(1.0, 0.5, 0, c + Vec2{0.1, 0.0}));
  sweep.push_back(point(2.0, 0.1, 0, c + Vec2{0.0, 0.004}));
  const DriftReport rep = x_a_drift_check(sweep, eff);
  EXPECT_NEAR(rep.rows[0].scaled, 0.2, 1e-12);
  EXPECT_NEAR(rep.rows[1].scaled, 0.04, 1e-12);
  EXPECT_NEAR(rep.rows[1].absolute, 0.004, 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_FALSE(x_a_drift_check(std::span(sweep).first(1), eff).pass);
}

TEST(CompareNonrotating, SelfComparisonVanishes) {
  const MinimizeResult r = synthetic_blowup(2.0, {0.2, 0.1}, 1.0, 0.3);
  EXPECT_EQ(compare_nonrotating(r, r, {128, 8.0}), 0.0);
  const MinimizeResult other = synthetic_blowup(2.5, {0.2, 0.1}, 1.0, 0.3);
  const MinimizeResult again = synthetic_blowup(2.0, {0.2, 0.1}, 0.0, 1.0);
  // Rescaling removes the width, the gauge phase and the global phase.
  EXPECT_LT(compare_nonrotating(r, other, {128, 8.0}), 2e-3);
  EXPECT_LT(compare_nonrotating(r, again, {128, 8.0}), 1e-8);
}

TEST(EnergyAudit, DecompositionIsExactAtMinimizer) {
  const double a = 0.9 * townes().constants.a_star;
  const GpProblem p = make_problem(a, EffectivePotential(PotentialSpec::harmonic(), 1.0));
  const MinimizeResult r = minimize(p, MinimizeConfig{});
  ASSERT_TRUE(r.converged);
  const EnergyAudit audit = energy_identity_audit(r, p, {256, 10.0});
  EXPECT_LT(std::abs(audit.defect), 1e-8);
  EXPECT_GE(audit.bracket, -1e-9);
  EXPECT_NEAR(audit.scaled_energy, r.eps_a * r.eps_a * r.breakdown.total, 1e-15);
}
