#include "rotbec/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rotbec/error.hpp"

namespace rotbec {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Field2D& u, const Field2D& v, const char* what) {
  if (!(u.grid() == v.grid())) throw ConfigError(std::string(what) + ": fields live on different grids");
}

}  // namespace

Grid2D::Grid2D(int n, double half_width, Vec2 center) : n_(n), half_width_(half_width), center_(center) {
  if (!is_power_of_two(n) || n < 64 || n > 1024) {
    throw ConfigError("grid size must be a power of two in [64, 1024], got " + std::to_string(n));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("grid half width must be positive and finite");
  }
  k_.resize(static_cast<std::size_t>(n));
  const double dk = std::numbers::pi / half_width;  // 2 pi / (2 L)
  for (int i = 0; i < n; ++i) {
    const int m = (i <= n / 2) ? i : i - n;
    k_[static_cast<std::size_t>(i)] = dk * m;
  }
  // The Nyquist bin has no well-defined sign; zeroing it keeps derivatives of
  // real fields real.
  k_[static_cast<std::size_t>(n / 2)] = 0.0;
}

double Grid2D::wavenumber(int i) const { return k_[static_cast<std::size_t>(i)]; }

bool Grid2D::contains(Vec2 p) const {
  return p.x >= center_.x - half_width_ && p.x < center_.x + half_width_ &&
         p.y >= center_.y - half_width_ && p.y < center_.y + half_width_;
}

Field2D::Field2D(Grid2D grid) : grid_(std::move(grid)), values_(grid_.size(), cplx{0.0, 0.0}) {}

Field2D::Field2D(Grid2D grid, CVector values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ConfigError("field sample count does not match grid");
}

double Field2D::mass() const {
  if (!mass_) {
    double s = 0.0;
    for (const auto& z : values_) s += std::norm(z);
    mass_ = s * grid_.cell_area();
  }
  return *mass_;
}

bool Field2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double Field2D::max_abs() const {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z));
  return m;
}

void Field2D::scale(cplx factor) {
  for (auto& z : values_) z *= factor;
  mass_.reset();
}

double integrate(std::span<const double> density, const Grid2D& grid) {
  double s = 0.0;
  for (double d : density) s += d;
  return s * grid.cell_area();
}

cplx inner(const Field2D& u, const Field2D& v) {
  require_same_grid(u, v, "inner");
  cplx s{0.0, 0.0};
  const auto a = u.values();
  const auto b = v.values();
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s * u.grid().cell_area();
}

Field2D normalize(const Field2D& u) {
  Field2D out = u;
  normalize_in_place(out);
  return out;
}

void normalize_in_place(Field2D& u) {
  const double m = u.mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("cannot normalize a field with zero or non-finite mass");
  u.scale(1.0 / std::sqrt(m));
}

Field2D phase_rotate(const Field2D& u, double theta) {
  Field2D out = u;
  out.scale(std::polar(1.0, theta));
  return out;
}

Gradient spectral_gradient(const Field2D& u) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  const Fft2D fft(n);
  CVector hat;
  fft.forward(u.data(), hat);
  CVector hx(hat.size()), hy(hat.size());
  const auto& k = g.wavenumbers();
  const cplx I{0.0, 1.0};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      hx[idx] = I * k[static_cast<std::size_t>(i)] * hat[idx];
      hy[idx] = I * k[static_cast<std::size_t>(j)] * hat[idx];
    }
  }
  fft.inverse_in_place(hx);
  fft.inverse_in_place(hy);
  return {Field2D(g, std::move(hx)), Field2D(g, std::move(hy))};
}

Field2D spectral_laplacian(const Field2D& u) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  const Fft2D fft(n);
  CVector hat;
  fft.forward(u.data(), hat);
  const auto& k = g.wavenumbers();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double k2 = k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)] +
                        k[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)];
      hat[g.index(i, j)] *= -k2;
    }
  }
  fft.inverse_in_place(hat);
  return Field2D(g, std::move(hat));
}

double kinetic_energy(const Field2D& u) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  const Fft2D fft(n);
  CVector hat;
  fft.forward(u.data(), hat);
  const auto& k = g.wavenumbers();
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double k2 = k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)] +
                        k[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)];
      s += k2 * std::norm(hat[g.index(i, j)]);
    }
  }
  // Parseval: sum |u|^2 dA = (dA / n^2) sum |u_hat|^2.
  return s * g.cell_area() / (static_cast<double>(n) * n);
}

Current probability_current(const Field2D& u, const Gradient& gr) {
  const auto v = u.values();
  const auto dx = gr.dx.values();
  const auto dy = gr.dy.values();
  Current c{RVector(v.size()), RVector(v.size())};
  for (std::size_t k = 0; k < v.size(); ++k) {
    c.jx[k] = (std::conj(v[k]) * dx[k]).imag();
    c.jy[k] = (std::conj(v[k]) * dy[k]).imag();
  }
  return c;
}

double lz_term(const Field2D& u) {
  const Grid2D& g = u.grid();
  const Gradient gr = spectral_gradient(u);
  // <u, -i x^perp . grad u>: the real part is the rotation integral; the
  // imaginary part vanishes in the continuum and measures discretization error.
  cplx s{0.0, 0.0};
  const cplx minus_i{0.0, -1.0};
  const int n = g.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      const Vec2 p = g.point(i, j);
      const cplx d = -p.y * gr.dx.data()[idx] + p.x * gr.dy.data()[idx];
      s += std::conj(u.data()[idx]) * minus_i * d;
    }
  }
  s *= g.cell_area();
  if (std::abs(s.imag()) > 1e-8 * std::max(1.0, u.mass())) {
    throw NumericalError("rotation term has imaginary residue " + std::to_string(s.imag()) +
                         "; grid too coarse for this field");
  }
  return s.real();
}

PhaseAlignment phase_aligned_distance(const Field2D& u, const Field2D& v) {
  require_same_grid(u, v, "phase_aligned_distance");
  // ||e^{it} u - v||^2 = |u|^2 + |v|^2 - 2 Re(e^{-it} <u, v>), smallest at t = arg <u, v>.
  const cplx c = inner(u, v);
  double theta = std::arg(c);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  // Summed directly: expanding the norm cancels to sqrt(machine epsilon).
  const cplx rot = std::polar(1.0, theta);
  double d2 = 0.0;
  for (std::size_t k = 0; k < u.data().size(); ++k) d2 += std::norm(rot * u.data()[k] - v.data()[k]);
  return {theta, std::sqrt(d2 * u.grid().cell_area())};
}

double boundary_mass(const Field2D& u, int cells) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const bool row_edge = j < cells || j >= n - cells;
    for (int i = 0; i < n; ++i) {
      if (row_edge || i < cells || i >= n - cells) s += std::norm(u.data()[g.index(i, j)]);
    }
  }
  return s * g.cell_area();
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SplitMix64 SplitMix64::split() { return SplitMix64(next()); }

namespace {

void require_resolved_width(const Grid2D& grid, double width) {
  if (!(width > 0.0)) throw ConfigError("initializer width must be positive");
  if (width / grid.dx() < 6.0) {
    throw ConfigError("initializer width " + std::to_string(width) + " is resolved by fewer than 6 grid points");
  }
}

}  // namespace

Field2D gaussian_init(const Grid2D& grid, double width, Vec2 center) {
  require_resolved_width(grid, width);
  Field2D u(grid);
  const int n = grid.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 d = grid.point(i, j) - center;
      u.data_mut()[grid.index(i, j)] = std::exp(-d.norm_sq() / (2.0 * width * width));
    }
  }
  normalize_in_place(u);
  return u;
}

Field2D vortex_init(const Grid2D& grid, int charge, double width) {
  require_resolved_width(grid, width);
  const Vec2 c = grid.center();
  const Vec2 core = c + Vec2{0.5 * grid.dx(), 0.5 * grid.dx()};
  const int m = std::abs(charge);
  const double sign = charge >= 0 ? 1.0 : -1.0;
  Field2D u(grid);
  const int n = grid.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p = grid.point(i, j);
      const Vec2 d = p - core;
      const cplx z{d.x / width, sign * d.y / width};
      const double env = std::exp(-(p - c).norm_sq() / (2.0 * width * width));
      u.data_mut()[grid.index(i, j)] = std::pow(z, m) * env;
    }
  }
  normalize_in_place(u);
  return u;
}

Field2D random_init(const Grid2D& grid, std::uint64_t seed) {
  const int n = grid.n();
  SplitMix64 rng(seed);
  CVector noise(grid.size());
  for (auto& z : noise) {
    const double re = 2.0 * rng.uniform() - 1.0;
    const double im = 2.0 * rng.uniform() - 1.0;
    z = {re, im};
  }
  const Fft2D fft(n);
  fft.forward_in_place(noise);
  const auto& k = grid.wavenumbers();
  const double kcut = (2.0 / 3.0) * std::numbers::pi / grid.dx();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(k[static_cast<std::size_t>(i)]) > kcut || std::abs(k[static_cast<std::size_t>(j)]) > kcut ||
          i == n / 2 || j == n / 2) {
        noise[grid.index(i, j)] = 0.0;
      }
    }
  }
  fft.inverse_in_place(noise);

  const double sigma = grid.half_width() / 4.0;
  const Vec2 c = grid.center();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 d = grid.point(i, j) - c;
      noise[grid.index(i, j)] *= std::exp(-d.norm_sq() / (2.0 * sigma * sigma));
    }
  }
  Field2D u(grid, std::move(noise));
  normalize_in_place(u);
  return u;
}

}  // namespace rotbec
