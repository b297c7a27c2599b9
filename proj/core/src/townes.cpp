#include "rotbec/townes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "rotbec/error.hpp"

namespace rotbec {

namespace {

struct State {
  double w;
  double p;  // w'
};

State rhs(double r, State s) {
  // w'' = -w'/r + w - w^3; the origin is never evaluated (the first step uses the series).
  return {s.p, -s.p / r + s.w - s.w * s.w * s.w};
}

enum class Shot { overshoot, undershoot };

struct Trajectory {
  std::vector<double> w;
  std::vector<double> p;
  Shot kind = Shot::undershoot;
  std::size_t stop = 0;  // last valid index
};

// Log-derivative of the decaying linear solution K0.
double k0_log_derivative(double r) { return -std::cyl_bessel_k(1.0, r) / std::cyl_bessel_k(0.0, r); }

Trajectory shoot(double w0, double h, std::size_t steps) {
  Trajectory t;
  t.w.assign(steps + 1, 0.0);
  t.p.assign(steps + 1, 0.0);
  t.w[0] = w0;
  t.p[0] = 0.0;
  // Even power series w = sum a_j r^{2j} from (2j)^2 a_j = [w - w^3]_{j-1}.
  // RK4 loses its order next to the 1/r coefficient, so the series covers
  // r <= 0.1, where the first omitted term is below 1e-14.
  constexpr int kTerms = 8;
  std::array<double, kTerms> a{};
  std::array<double, kTerms> sq{};
  a[0] = w0;
  for (int j = 1; j < kTerms; ++j) {
    const int m = j - 1;
    sq[m] = 0.0;
    for (int i = 0; i <= m; ++i) sq[m] += a[i] * a[m - i];
    double cube = 0.0;
    for (int i = 0; i <= m; ++i) cube += sq[i] * a[m - i];
    a[j] = (a[m] - cube) / (4.0 * j * j);
  }
  const auto series_end = std::min(steps, static_cast<std::size_t>(0.1 / h + 1e-9));
  for (std::size_t k = 1; k <= series_end; ++k) {
    const double r = static_cast<double>(k) * h;
    const double r2 = r * r;
    double w = 0.0, p = 0.0, pw = 1.0;
    for (int j = 0; j < kTerms; ++j) {
      w += a[j] * pw;
      if (j > 0) p += 2.0 * j * a[j] * pw / r;
      pw *= r2;
    }
    t.w[k] = w;
    t.p[k] = p;
  }
  for (std::size_t k = std::max<std::size_t>(series_end, 1); k < steps; ++k) {
    const double r = static_cast<double>(k) * h;
    const State s{t.w[k], t.p[k]};
    const State k1 = rhs(r, s);
    const State k2 = rhs(r + h / 2, {s.w + h / 2 * k1.w, s.p + h / 2 * k1.p});
    const State k3 = rhs(r + h / 2, {s.w + h / 2 * k2.w, s.p + h / 2 * k2.p});
    const State k4 = rhs(r + h, {s.w + h * k3.w, s.p + h * k3.p});
    t.w[k + 1] = s.w + h / 6 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
    t.p[k + 1] = s.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    if (t.w[k + 1] <= 0.0) {
      t.kind = Shot::overshoot;
      t.stop = k;
      return t;
    }
    if (t.p[k + 1] > 0.0) {
      t.kind = Shot::undershoot;
      t.stop = k;
      return t;
    }
  }
  // Reached r_max without a decision: compare against the decaying solution.
  const double r_end = static_cast<double>(steps) * h;
  const double q = t.p[steps] / t.w[steps] - k0_log_derivative(r_end);
  t.kind = q > 0.0 ? Shot::undershoot : Shot::overshoot;
  t.stop = steps;
  return t;
}

// Composite Simpson on nodes 0..N (N even) of f, step h.
double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  double s = f.front() + f.back();
  for (std::size_t k = 1; k < n; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f[k];
  return s * h / 3.0;
}

}  // namespace

RadialProfile solve_townes(double r_max, double h, double tol) {
  if (!(r_max >= 15.0)) throw ConfigError("solve_townes: r_max must be at least 15");
  if (!(h > 0.0 && h <= 0.01)) throw ConfigError("solve_townes: step must lie in (0, 0.01]");
  if (!(tol > 0.0 && tol <= 1e-10)) throw ConfigError("solve_townes: tol must lie in (0, 1e-10]");
  const auto steps = static_cast<std::size_t>(std::llround(r_max / h));
  if (steps % 2 != 0 || std::abs(static_cast<double>(steps) * h - r_max) > 1e-9 * r_max) {
    throw ConfigError("solve_townes: r_max must be an even multiple of the step");
  }

  double lo = 2.0;
  double hi = 2.4;
  Trajectory t_lo = shoot(lo, h, steps);
  Trajectory t_hi = shoot(hi, h, steps);
  if (t_lo.kind != Shot::undershoot || t_hi.kind != Shot::overshoot) {
    throw ConfigError("solve_townes: bracket [2.0, 2.4] for w(0) does not straddle the ground state");
  }

  // Bisect to the resolution of double precision; tol only bounds what is acceptable.
  constexpr int kMaxIterations = 200;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Trajectory t = shoot(mid, h, steps);
    if (t.kind == Shot::undershoot) {
      lo = mid;
      t_lo = std::move(t);
    } else {
      hi = mid;
      t_hi = std::move(t);
    }
  }
  if (hi - lo > tol * lo) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "solve_townes: bisection did not converge, last bracket [" << lo << ", " << hi
        << "]";
    throw NumericalError(msg.str());
  }

  // Both bracket ends follow the ground state until the unstable growing mode
  // separates them; trust the trajectory only while they agree closely.
  const std::size_t last = std::min(t_lo.stop, t_hi.stop);
  std::size_t match = 1;
  for (std::size_t k = 1; k <= last; ++k) {
    const double a = t_lo.w[k];
    const double b = t_hi.w[k];
    if (std::abs(a - b) > 1e-7 * std::abs(a) || t_lo.p[k] >= 0.0 || a <= 0.0) break;
    match = k;
  }

  RadialProfile prof;
  prof.h = h;
  prof.r_max = r_max;
  prof.r.resize(steps + 1);
  prof.w.resize(steps + 1);
  prof.dw.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) prof.r[k] = static_cast<double>(k) * h;
  for (std::size_t k = 0; k <= match; ++k) {
    prof.w[k] = 0.5 * (t_lo.w[k] + t_hi.w[k]);
    prof.dw[k] = 0.5 * (t_lo.p[k] + t_hi.p[k]);
  }
  const double rc = prof.r[match];
  prof.matched_at = rc;
  const double k0c = std::cyl_bessel_k(0.0, rc);
  const double amp = prof.w[match] / k0c;
  for (std::size_t k = match + 1; k <= steps; ++k) {
    const double r = prof.r[k];
    prof.w[k] = amp * std::cyl_bessel_k(0.0, r);
    prof.dw[k] = -amp * std::cyl_bessel_k(1.0, r);
  }
  return prof;
}

double RadialProfile::value(double radius) const {
  const double rr = std::abs(radius);
  if (rr >= r_max) return 0.0;
  const auto k = std::min(static_cast<std::size_t>(rr / h), r.size() - 2);
  const double t = (rr - r[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * w[k] + h10 * h * dw[k] + h01 * w[k + 1] + h11 * h * dw[k + 1];
}

double RadialProfile::derivative(double radius) const {
  const double rr = std::abs(radius);
  if (rr >= r_max) return 0.0;
  const auto k = std::min(static_cast<std::size_t>(rr / h), r.size() - 2);
  const double t = (rr - r[k]) / h;
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t;
  const double d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t;
  const double d11 = 3 * t2 - 2 * t;
  return (d00 * w[k] + d01 * w[k + 1]) / h + d10 * dw[k] + d11 * dw[k + 1];
}

double max_ode_residual(const RadialProfile& profile) {
  const auto& w = profile.w;
  const double h = profile.h;
  const std::size_t n = w.size();
  // Even extension w(-r) = w(r) supplies the stencil at the first two nodes.
  auto at = [&](std::ptrdiff_t k) { return w[static_cast<std::size_t>(std::abs(k))]; };
  double worst = 0.0;
  for (std::size_t kk = 0; kk + 2 < n; ++kk) {
    const auto k = static_cast<std::ptrdiff_t>(kk);
    const double d2 = (-at(k + 2) + 16 * at(k + 1) - 30 * at(k) + 16 * at(k - 1) - at(k - 2)) / (12 * h * h);
    const double d1 = (-at(k + 2) + 8 * at(k + 1) - 8 * at(k - 1) + at(k - 2)) / (12 * h);
    const double r = profile.r[kk];
    const double radial = kk == 0 ? d2 : d1 / r;
    const double res = d2 + radial - at(k) + at(k) * at(k) * at(k);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

bool profile_invariants_hold(const RadialProfile& profile, double tail_bound) {
  const auto& w = profile.w;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!(w[k] > 0.0)) return false;
    if (k > 0 && !(w[k] < w[k - 1])) return false;
  }
  return w.back() < tail_bound && profile.dw.front() == 0.0;
}

TownesConstants townes_constants(const RadialProfile& profile) {
  const std::size_t n = profile.w.size();
  std::vector<double> f2(n), g2(n), f4(n), x2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = profile.r[k];
    const double w = profile.w[k];
    const double jac = 2.0 * std::numbers::pi * r;
    f2[k] = jac * w * w;
    g2[k] = jac * profile.dw[k] * profile.dw[k];
    f4[k] = jac * w * w * w * w;
    x2[k] = jac * r * r * w * w;
  }
  TownesConstants c;
  c.a_star = simpson(f2, profile.h);
  c.grad_sq = simpson(g2, profile.h);
  c.m4 = simpson(f4, profile.h);
  c.m2 = simpson(x2, profile.h);
  c.w0 = profile.w0();

  // Tail beyond r_max, with w ~ w(R) e^{-(r-R)}: integral of 2 pi r w^2 ~ pi R w(R)^2.
  const double tail = std::numbers::pi * profile.r_max * profile.w.back() * profile.w.back() *
                      (1.0 + profile.r_max * profile.r_max);
  if (tail > 1e-10 * c.a_star) {
    throw AccuracyError("townes_constants: profile has not decayed at r_max = " + std::to_string(profile.r_max) +
                        "; increase r_max");
  }
  return c;
}

Field2D sample_w_2d(const RadialProfile& profile, const Grid2D& grid, Vec2 center, double scale) {
  if (!(scale > 0.0)) throw ConfigError("sample_w_2d: scale must be positive");
  if ((1.0 / scale) / grid.dx() < 8.0) {
    throw ConfigError("sample_w_2d: grid resolves 1/scale with fewer than 8 points");
  }
  if (!grid.contains(center)) throw DomainError("sample_w_2d: center lies outside the grid");
  Field2D u(grid);
  auto& data = u.data_mut();
  const int n = grid.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double rho = scale * (grid.point(i, j) - center).norm();
      data[grid.index(i, j)] = profile.value(rho);
    }
  }
  return u;
}

void write_profile(std::ostream& os, const RadialProfile& profile) {
  const auto old = os.precision(16);
  for (std::size_t k = 0; k < profile.r.size(); ++k) {
    os << profile.r[k] << ' ' << profile.w[k] << '\n';
  }
  os.precision(old);
}

const Townes& default_townes() {
  static const Townes t = [] {
    Townes out;
    out.profile = solve_townes(20.0, 0.005, 1e-12);
    out.constants = townes_constants(out.profile);
    return out;
  }();
  return t;
}

}  // namespace rotbec
