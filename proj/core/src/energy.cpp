#include "rotbec/energy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rotbec/error.hpp"

namespace rotbec {

GpOperator::GpOperator(const Grid2D& grid, const GpProblem& prob) : grid_(grid), prob_(prob), trap_(grid.size()) {
  const int n = grid_.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) trap_[grid_.index(i, j)] = prob_.trap()(grid_.point(i, j));
  }
}

EnergyBreakdown GpOperator::evaluate(const Field2D& u, CVector* hu, CVector* u_hat) const {
  if (!(u.grid() == grid_)) throw ConfigError("GpOperator: field lives on a different grid");
  const int n = grid_.n();
  const std::size_t size = grid_.size();
  const auto& k = grid_.wavenumbers();
  const Fft2D fft(n);
  const double omega = prob_.omega();
  const double half_omega = 0.5 * omega;
  const double a = prob_.a;

  CVector local_hat;
  CVector& hat = u_hat != nullptr ? *u_hat : local_hat;
  fft.forward(u.data(), hat);

  CVector gx(size), gy(size);
  const cplx I{0.0, 1.0};
  for (int j = 0; j < n; ++j) {
    const double ky = k[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = grid_.index(i, j);
      gx[idx] = I * k[static_cast<std::size_t>(i)] * hat[idx];
      gy[idx] = I * ky * hat[idx];
    }
  }
  fft.inverse_in_place(gx);
  fft.inverse_in_place(gy);

  if (hu != nullptr) {
    hu->resize(size);
    for (int j = 0; j < n; ++j) {
      const double ky = k[static_cast<std::size_t>(j)];
      for (int i = 0; i < n; ++i) {
        const double kx = k[static_cast<std::size_t>(i)];
        const std::size_t idx = grid_.index(i, j);
        (*hu)[idx] = (kx * kx + ky * ky) * hat[idx];
      }
    }
    fft.inverse_in_place(*hu);
  }

  const auto& v = u.data();
  double kin = 0.0, pot = 0.0, quart = 0.0, cov = 0.0, veff = 0.0, mass = 0.0;
  cplx lz{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    const double y = grid_.y(j);
    for (int i = 0; i < n; ++i) {
      const double x = grid_.x(i);
      const std::size_t idx = grid_.index(i, j);
      const cplx z = v[idx];
      const double rho = std::norm(z);
      const double trap = trap_[idx];
      const cplx rot_dir = -y * gx[idx] + x * gy[idx];  // x^perp . grad u
      kin += std::norm(gx[idx]) + std::norm(gy[idx]);
      pot += trap * rho;
      quart += rho * rho;
      mass += rho;
      veff += (trap - half_omega * half_omega * (x * x + y * y)) * rho;
      // grad u - i A u with A = (Omega/2)(-y, x)
      cov += std::norm(gx[idx] + I * half_omega * y * z) + std::norm(gy[idx] - I * half_omega * x * z);
      lz += std::conj(z) * (-I) * rot_dir;
      if (hu != nullptr) (*hu)[idx] += trap * z + I * omega * rot_dir - a * rho * z;
    }
  }
  const double da = grid_.cell_area();
  lz *= da;
  mass *= da;
  // The imaginary part cancels exactly in exact arithmetic on the grid.
  if (std::abs(lz.imag()) > 1e-8 * std::max(1.0, mass)) {
    std::ostringstream os;
    os << "rotation term has imaginary residue " << lz.imag();
    throw NumericalError(os.str());
  }

  EnergyBreakdown e;
  e.kinetic = kin * da;
  e.potential = pot * da;
  e.quartic = quart * da;
  e.interaction = 0.5 * a * e.quartic;
  e.rotation = omega * lz.real();
  e.total = e.kinetic + e.potential - e.interaction - e.rotation;
  e.covariant_kinetic = cov * da;
  e.veff = veff * da;
  e.mass = mass;
  e.boundary_mass = boundary_mass(u);
  e.boundary_warning = e.boundary_mass > kBoundaryWarn;
  return e;
}

EnergyBreakdown gp_energy(const Field2D& u, const GpProblem& prob, AccuracyMode mode) {
  if (!u.all_finite()) throw NumericalError("gp_energy: field has non-finite samples");
  const GpOperator op(u.grid(), prob);
  EnergyBreakdown e = op.evaluate(u);
  const double limit = mode == AccuracyMode::strict ? kBoundaryWarn : kBoundaryLenient;
  if (e.boundary_mass > limit) {
    std::ostringstream os;
    os << "boundary mass " << e.boundary_mass << " exceeds " << limit << "; enlarge the box";
    throw AccuracyError(os.str());
  }
  return e;
}

ChemicalPotential chemical_potential(const Field2D& u, const GpProblem& prob, const EnergyBreakdown& e) {
  const GpOperator op(u.grid(), prob);
  CVector hu;
  (void)op.evaluate(u, &hu);
  ChemicalPotential c;
  c.mu = e.total - e.interaction;
  double r2 = 0.0;
  const auto& v = u.data();
  for (std::size_t k = 0; k < v.size(); ++k) r2 += std::norm(hu[k] - c.mu * v[k]);
  c.residual = std::sqrt(r2 * u.grid().cell_area());
  return c;
}

double modulus_gradient_sq(const Field2D& u, double delta) {
  const Gradient g = spectral_gradient(u);
  const auto& v = u.data();
  const auto& gx = g.dx.data();
  const auto& gy = g.dy.data();
  const double d2 = delta * delta;
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double px = (std::conj(v[k]) * gx[k]).real();
    const double py = (std::conj(v[k]) * gy[k]).real();
    s += (px * px + py * py) / (std::norm(v[k]) + d2);
  }
  return s * u.grid().cell_area();
}

DiamagneticReport diamagnetic_check(const Field2D& u, double omega) {
  const Grid2D& g = u.grid();
  const Gradient gr = spectral_gradient(u);
  const int n = g.n();
  const double h = 0.5 * omega;
  const cplx I{0.0, 1.0};
  double cov = 0.0, m2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double y = g.y(j);
    for (int i = 0; i < n; ++i) {
      const double x = g.x(i);
      const std::size_t idx = g.index(i, j);
      const cplx z = u.data()[idx];
      cov += std::norm(gr.dx.data()[idx] + I * h * y * z) + std::norm(gr.dy.data()[idx] - I * h * x * z);
      m2 += (x * x + y * y) * std::norm(z);
    }
  }
  cov *= g.cell_area();
  m2 *= g.cell_area();
  DiamagneticReport r;
  r.lhs = cov - h * h * m2;
  r.rhs = modulus_gradient_sq(u) - h * h * m2;
  r.slack = r.lhs - r.rhs;
  return r;
}

double energy_lower_bound_check(const Field2D& u, const GpProblem& prob) {
  const GpOperator op(u.grid(), prob);
  const EnergyBreakdown e = op.evaluate(u);
  return e.total - (1.0 - prob.a / prob.a_star) * modulus_gradient_sq(u) - e.veff;
}

Field2D gauge_translate(const Field2D& u, Vec2 b, double omega) {
  const double denom = 4.0 - omega * omega;
  if (!(omega >= 0.0) || !(denom > 0.0)) throw ConfigError("gauge_translate requires 0 <= Omega < 2");
  const Grid2D& g = u.grid();
  const double beta = 2.0 * omega / denom;
  const Vec2 bp = b.perp();
  const double nyquist = std::numbers::pi / g.dx();
  if (beta * bp.norm() > 0.5 * nyquist) {
    throw DomainError("gauge_translate: phase gradient is not resolved by the grid");
  }
  const Vec2 d = (4.0 / denom) * b;
  const Grid2D shifted(g.n(), g.half_width(), g.center() - d);
  CVector out(u.data());
  const int n = g.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p = shifted.point(i, j);
      out[shifted.index(i, j)] *= std::polar(1.0, -beta * p.dot(bp));
    }
  }
  return Field2D(shifted, std::move(out));
}

}  // namespace rotbec
