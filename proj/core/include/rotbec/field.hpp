#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rotbec/fft.hpp"
#include "rotbec/vec2.hpp"

namespace rotbec {

/// Uniform periodic square grid covering center + [-L, L)^2 with n points per
/// side. Samples are stored row-major with y as the slow index.
class Grid2D {
 public:
  Grid2D(int n, double half_width, Vec2 center = {});

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] Vec2 center() const { return center_; }
  [[nodiscard]] double dx() const { return 2.0 * half_width_ / n_; }
  [[nodiscard]] double cell_area() const { return dx() * dx(); }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }

  /// Absolute coordinates of column i / row j.
  [[nodiscard]] double x(int i) const { return center_.x - half_width_ + i * dx(); }
  [[nodiscard]] double y(int j) const { return center_.y - half_width_ + j * dx(); }
  [[nodiscard]] Vec2 point(int i, int j) const { return {x(i), y(j)}; }

  /// Angular wavenumber of DFT bin i in standard FFT ordering.
  [[nodiscard]] double wavenumber(int i) const;
  [[nodiscard]] const std::vector<double>& wavenumbers() const { return k_; }

  [[nodiscard]] bool contains(Vec2 p) const;

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.n_ == b.n_ && a.half_width_ == b.half_width_ && a.center_ == b.center_;
  }

 private:
  int n_;
  double half_width_;
  Vec2 center_;
  std::vector<double> k_;
};

/// Complex samples of a wavefunction on a Grid2D.
///
/// The mass (discrete L2 norm squared) is cached; every mutable accessor
/// invalidates the cache. A Field2D must not be mutated while another thread
/// reads it.
class Field2D {
 public:
  explicit Field2D(Grid2D grid);
  Field2D(Grid2D grid, CVector values);

  [[nodiscard]] const Grid2D& grid() const { return grid_; }
  [[nodiscard]] std::span<const cplx> values() const { return values_; }
  [[nodiscard]] const CVector& data() const { return values_; }
  [[nodiscard]] CVector& data_mut() {
    mass_.reset();
    return values_;
  }
  [[nodiscard]] cplx at(int i, int j) const { return values_[grid_.index(i, j)]; }
  void set(int i, int j, cplx v) {
    mass_.reset();
    values_[grid_.index(i, j)] = v;
  }

  [[nodiscard]] double mass() const;
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double max_abs() const;

  void scale(cplx factor);

 private:
  Grid2D grid_;
  CVector values_;
  mutable std::optional<double> mass_;
};

/// Discrete integral of a real density (sum times cell area).
[[nodiscard]] double integrate(std::span<const double> density, const Grid2D& grid);

/// Complex L2 inner product <u, v> = sum conj(u) v dA.
[[nodiscard]] cplx inner(const Field2D& u, const Field2D& v);

[[nodiscard]] Field2D normalize(const Field2D& u);
void normalize_in_place(Field2D& u);

/// e^{i theta} u.
[[nodiscard]] Field2D phase_rotate(const Field2D& u, double theta);

struct Gradient {
  Field2D dx;
  Field2D dy;
};

/// Derivatives by multiplication with i k in transform space.
[[nodiscard]] Gradient spectral_gradient(const Field2D& u);
[[nodiscard]] Field2D spectral_laplacian(const Field2D& u);

/// Integral of |grad u|^2 evaluated by Parseval in transform space.
[[nodiscard]] double kinetic_energy(const Field2D& u);

/// Integral of x^perp . (iu, grad u), with (iu, grad u) = Im(conj(u) grad u).
/// Throws NumericalError if the imaginary residue of the underlying complex
/// integral exceeds 1e-8 (grid too coarse).
[[nodiscard]] double lz_term(const Field2D& u);

/// Pointwise current Im(conj(u) grad u), as two real arrays.
struct Current {
  RVector jx;
  RVector jy;
};
[[nodiscard]] Current probability_current(const Field2D& u, const Gradient& g);

/// min over theta of || e^{i theta} u - v ||_2 and the minimizing theta in [0, 2pi).
struct PhaseAlignment {
  double theta = 0.0;
  double distance = 0.0;
};
[[nodiscard]] PhaseAlignment phase_aligned_distance(const Field2D& u, const Field2D& v);

/// Mass in the outer strip of the box (outermost `cells` rows and columns).
[[nodiscard]] double boundary_mass(const Field2D& u, int cells = 4);

/// Counter-based splittable 64-bit generator (SplitMix64). The k-th draw of a
/// stream depends only on the seed and k.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Independent child stream.
  SplitMix64 split();

 private:
  std::uint64_t state_;
};

/// Normalized Gaussian exp(-|x - center|^2 / (2 width^2)). Requires at least
/// six grid points per width.
[[nodiscard]] Field2D gaussian_init(const Grid2D& grid, double width, Vec2 center = {});

/// Normalized Gaussian of the given width with a phase singularity of winding
/// `charge`. The core sits at the middle of the plaquette whose lower-left
/// corner is the grid node at the box center.
[[nodiscard]] Field2D vortex_init(const Grid2D& grid, int charge, double width);

/// Deterministic random field: uniform complex noise drawn from
/// SplitMix64(seed), low-passed at 2/3 of the Nyquist wavenumber, multiplied by
/// a Gaussian envelope of width L/4 about the box center and normalized.
[[nodiscard]] Field2D random_init(const Grid2D& grid, std::uint64_t seed);

}  // namespace rotbec
