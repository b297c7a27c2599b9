#include "rotbec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotbec/error.hpp"

namespace rotbec {

namespace {

double phase_step(cplx from, cplx to) { return std::arg(to * std::conj(from)); }

int round_winding(double total) { return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi))); }

// Signed DFT frequencies with the Nyquist bin marked by `skip`.
std::vector<double> interpolation_wavenumbers(const Grid2D& g, int& skip) {
  const int n = g.n();
  std::vector<double> k(static_cast<std::size_t>(n));
  const double dk = std::numbers::pi / g.half_width();
  for (int p = 0; p < n; ++p) k[static_cast<std::size_t>(p)] = dk * (p <= n / 2 ? p : p - n);
  skip = n / 2;
  return k;
}

Field2D rescaled_field(const MinimizeResult& r, double omega, const Grid2D& target) {
  const double eps = r.eps_a;
  Field2D v = resample_affine(r.field, target, eps, r.x_a);
  const Vec2 xap = r.x_a.perp();
  auto& d = v.data_mut();
  const int n = target.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p = target.point(i, j);
      d[target.index(i, j)] *= eps * std::polar(1.0, -0.5 * eps * omega * p.dot(xap));
    }
  }
  return v;
}

void require_interior_peak(const MinimizeResult& r) {
  const Grid2D& g = r.field.grid();
  const double margin = 4.0 * g.dx();
  const Vec2 lo = g.center() - Vec2{g.half_width(), g.half_width()};
  const Vec2 hi = g.center() + Vec2{g.half_width(), g.half_width()};
  if (r.x_a.x < lo.x + margin || r.x_a.x > hi.x - margin || r.x_a.y < lo.y + margin || r.x_a.y > hi.y - margin) {
    throw DomainError("peak location lies within 4 cells of the box edge");
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<Winding> winding_numbers(const Field2D& u, double amp_floor) {
  if (!(amp_floor > 0.0 && amp_floor < 0.5)) throw ConfigError("amplitude floor must lie in (0, 0.5)");
  const Grid2D& g = u.grid();
  const int n = g.n();
  const double floor = amp_floor * u.max_abs();
  std::vector<Winding> out;
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const cplx c0 = u.at(i, j), c1 = u.at(i + 1, j), c2 = u.at(i + 1, j + 1), c3 = u.at(i, j + 1);
      if (std::abs(c0) <= floor || std::abs(c1) <= floor || std::abs(c2) <= floor || std::abs(c3) <= floor) continue;
      const double total = phase_step(c0, c1) + phase_step(c1, c2) + phase_step(c2, c3) + phase_step(c3, c0);
      if (const int q = round_winding(total); q != 0) out.push_back({i, j, q});
    }
  }
  return out;
}

int loop_winding(const Field2D& u, int i0, int j0, int i1, int j1) {
  const int n = u.grid().n();
  if (!(0 <= i0 && i0 < i1 && i1 < n && 0 <= j0 && j0 < j1 && j1 < n)) throw ConfigError("invalid loop rectangle");
  double total = 0.0;
  for (int i = i0; i < i1; ++i) total += phase_step(u.at(i, j0), u.at(i + 1, j0));
  for (int j = j0; j < j1; ++j) total += phase_step(u.at(i1, j), u.at(i1, j + 1));
  for (int i = i1; i > i0; --i) total += phase_step(u.at(i, j1), u.at(i - 1, j1));
  for (int j = j1; j > j0; --j) total += phase_step(u.at(i0, j), u.at(i0, j - 1));
  return round_winding(total);
}

Field2D resample_affine(const Field2D& u, const Grid2D& target, double scale, Vec2 shift) {
  const Grid2D& src = u.grid();
  const int ns = src.n();
  const int nt = target.n();
  const Fft2D fft(ns);
  CVector c;
  fft.forward(u.data(), c);
  const double norm = 1.0 / (static_cast<double>(ns) * ns);
  int skip = 0;
  const std::vector<double> k = interpolation_wavenumbers(src, skip);
  const double x0 = src.x(0);
  const double y0 = src.y(0);

  // Basis rows: ex[i][p] = exp(i k_p (X_i - x0)), ey[j][q] likewise.
  std::vector<cplx> ex(static_cast<std::size_t>(nt) * ns), ey(static_cast<std::size_t>(nt) * ns);
  for (int i = 0; i < nt; ++i) {
    const double xs = scale * target.x(i) + shift.x - x0;
    const double ys = scale * target.y(i) + shift.y - y0;
    for (int p = 0; p < ns; ++p) {
      const std::size_t at = static_cast<std::size_t>(i) * ns + p;
      ex[at] = p == skip ? cplx{} : std::polar(1.0, k[static_cast<std::size_t>(p)] * xs);
      ey[at] = p == skip ? cplx{} : std::polar(1.0, k[static_cast<std::size_t>(p)] * ys);
    }
  }
  // t[q][i] = sum_p c[q][p] ex[i][p]
  std::vector<cplx> t(static_cast<std::size_t>(ns) * nt);
  for (int q = 0; q < ns; ++q) {
    const cplx* row = &c[static_cast<std::size_t>(q) * ns];
    for (int i = 0; i < nt; ++i) {
      const cplx* e = &ex[static_cast<std::size_t>(i) * ns];
      cplx s{};
      for (int p = 0; p < ns; ++p) s += row[p] * e[p];
      t[static_cast<std::size_t>(q) * nt + i] = s;
    }
  }
  Field2D out(target);
  auto& v = out.data_mut();
  for (int j = 0; j < nt; ++j) {
    const cplx* e = &ey[static_cast<std::size_t>(j) * ns];
    for (int i = 0; i < nt; ++i) {
      cplx s{};
      for (int q = 0; q < ns; ++q) s += e[q] * t[static_cast<std::size_t>(q) * nt + i];
      v[target.index(i, j)] = s * norm;
    }
  }
  return out;
}

BlowupObservables blowup_rescale(const MinimizeResult& result, double omega, const Townes& townes,
                                 const RescaleConfig& cfg, double amp_floor) {
  require_interior_peak(result);
  const Grid2D target(cfg.n, cfg.half_width);
  const Field2D wa = rescaled_field(result, omega, target);
  Field2D ref = sample_w_2d(townes.profile, target, {}, 1.0);
  ref.scale(1.0 / std::sqrt(townes.constants.a_star));

  const PhaseAlignment pa = phase_aligned_distance(wa, ref);
  Field2D aligned = phase_rotate(wa, pa.theta);

  BlowupObservables obs;
  obs.eps_a = result.eps_a;
  obs.x_a = result.x_a;
  obs.theta_a = pa.theta;
  Field2D imag(target);
  auto& im = imag.data_mut();
  double wi = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const cplx z = aligned.data()[k];
    const double w = ref.data()[k].real();
    obs.profile_sup_err = std::max(obs.profile_sup_err, std::abs(z - w));
    obs.modulus_sup_err = std::max(obs.modulus_sup_err, std::abs(std::abs(z) - w));
    obs.realpart_sup_err = std::max(obs.realpart_sup_err, std::abs(z.real() - w));
    im[k] = z.imag();
    wi += w * z.imag();
  }
  obs.orthogonality = wi * target.cell_area();
  obs.imag_l2 = std::sqrt(imag.mass());
  obs.imag_h1 = std::sqrt(imag.mass() + kinetic_energy(imag));
  obs.rescaled_l2 = std::sqrt(aligned.mass());
  obs.windings = winding_numbers(result.field, amp_floor);
  obs.aligned = std::move(aligned);
  return obs;
}

ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingMode mode, double a_star, double gamma,
                       double lambda) {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (p.a / a_star >= 0.9 && p.a < a_star && p.value > 0.0) {
      xs.push_back(std::log(a_star - p.a));
      ys.push_back(std::log(p.value));
    }
  }
  if (xs.size() < 4) throw ConfigError("fit_scaling needs at least four points with a/a* >= 0.9");
  const auto m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  ScalingFit fit;
  fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - fit.exponent * sx) / m;
  fit.coefficient = std::exp(intercept);
  const double mean = sy / m;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (intercept + fit.exponent * xs[k]);
    ss_res += r * r;
    ss_tot += (ys[k] - mean) * (ys[k] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  if (mode == ScalingMode::energy) {
    fit.predicted_exponent = gamma / (gamma + 2.0);
    fit.predicted_coefficient = (1.0 + 2.0 / gamma) * lambda * lambda / a_star;
  } else {
    fit.predicted_exponent = 1.0 / (gamma + 2.0);
    fit.predicted_coefficient = 1.0 / lambda;
  }
  return fit;
}

bool trend_bounded(std::span<const double> values, double factor, double floor) {
  if (values.size() < 2) throw ConfigError("trend check needs at least two values");
  const std::vector<double> earlier(values.begin(), values.end() - 1);
  return values.back() <= factor * median(earlier) + floor;
}

MuLimitReport mu_limit_check(std::span<const SweepPoint> sweep) {
  MuLimitReport rep;
  for (const auto& p : sweep) {
    MuRow row;
    row.a = p.a;
    const double e2 = p.result.eps_a * p.result.eps_a;
    row.mu_eps2 = p.result.mu * e2;
    row.one_plus = 1.0 + row.mu_eps2;
    row.eps4 = e2 * e2;
    row.ratio = std::abs(row.one_plus) / row.eps4;
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 2) {
    const std::size_t first = rep.rows.size() > 4 ? rep.rows.size() - 4 : 0;
    std::vector<double> ratios;
    for (std::size_t k = first; k < rep.rows.size(); ++k) ratios.push_back(rep.rows[k].ratio);
    rep.bounded = trend_bounded(ratios);
  }
  return rep;
}

DriftReport x_a_drift_check(std::span<const SweepPoint> sweep, const EffectivePotential& eff, Vec2 y0) {
  DriftReport rep;
  const Vec2 c = eff.concentration_point();
  for (const auto& p : sweep) {
    const Vec2 d = p.result.x_a - c;
    rep.rows.push_back({p.a, ((1.0 / p.result.eps_a) * d - y0).norm(), d.norm()});
  }
  rep.pass = !rep.rows.empty() && rep.rows.back().scaled < 0.05;
  return rep;
}

double compare_nonrotating(const MinimizeResult& rotating, const MinimizeResult& still, const RescaleConfig& cfg) {
  require_interior_peak(rotating);
  require_interior_peak(still);
  const Grid2D target(cfg.n, cfg.half_width);
  // Moduli ignore the gauge phase, so Omega = 0 is passed for both.
  const Field2D a = rescaled_field(rotating, 0.0, target);
  const Field2D b = rescaled_field(still, 0.0, target);
  double sup = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    sup = std::max(sup, std::abs(std::abs(a.data()[k]) - std::abs(b.data()[k])));
  }
  return sup;
}

EnergyAudit energy_identity_audit(const MinimizeResult& result, const GpProblem& prob, const RescaleConfig& cfg) {
  require_interior_peak(result);
  const Grid2D target(cfg.n, cfg.half_width);
  const double omega = prob.omega();
  const Field2D wa = rescaled_field(result, omega, target);
  const double eps = result.eps_a;
  const double e2 = eps * eps;

  const Gradient g = spectral_gradient(wa);
  double kin = 0, q4 = 0, m2 = 0, veff = 0, lz = 0;
  const int n = target.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = target.index(i, j);
      const Vec2 x = target.point(i, j);
      const cplx z = wa.data()[idx];
      const double rho = std::norm(z);
      const cplx gx = g.dx.data()[idx];
      const cplx gy = g.dy.data()[idx];
      kin += std::norm(gx) + std::norm(gy);
      q4 += rho * rho;
      m2 += x.norm_sq() * rho;
      veff += v_omega(prob.eff, eps * x + result.x_a) * rho;
      lz += -x.y * (std::conj(z) * gx).imag() + x.x * (std::conj(z) * gy).imag();
    }
  }
  const double da = target.cell_area();
  kin *= da;
  q4 *= da;
  m2 *= da;
  veff *= da;
  lz *= da;

  EnergyAudit audit;
  audit.scaled_energy = e2 * result.breakdown.total;
  audit.bracket = kin - 0.5 * prob.a_star * q4;
  audit.remainder = 0.5 * (prob.a_star - prob.a) * q4 + e2 * e2 * 0.25 * omega * omega * m2 + e2 * veff -
                    e2 * omega * lz;
  audit.defect = audit.scaled_energy - audit.bracket - audit.remainder;
  return audit;
}

}  // namespace rotbec
