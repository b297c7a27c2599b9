#include "rotbec/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "rotbec/error.hpp"

namespace rotbec {

SpectrumReport linearized_spectrum(const RadialProfile& profile, LinearOp op, int sector, int count, double h,
                                   double r_max) {
  if (sector < 0) throw ConfigError("angular sector must be nonnegative");
  if (count < 1) throw ConfigError("eigenvalue count must be positive");
  if (!(h > 0.0) || !(r_max > 10.0 * h)) throw ConfigError("invalid radial grid for the spectrum");
  const auto n = static_cast<lapack_int>(std::llround(r_max / h));
  if (count > n) throw ConfigError("more eigenvalues requested than grid cells");
  const double c = op == LinearOp::L ? 1.0 : 3.0;
  const double m2 = static_cast<double>(sector) * sector;
  const auto nn = static_cast<std::size_t>(n);

  std::vector<double> r(nn), diag(nn), off(nn > 0 ? nn - 1 : 0);
  for (std::size_t j = 0; j < nn; ++j) r[j] = (static_cast<double>(j) + 0.5) * h;
  const double h2 = h * h;
  for (std::size_t j = 0; j < nn; ++j) {
    // Face radii r_{j-1/2}, r_{j+1/2}; the flux through r = 0 vanishes.
    const double face_lo = static_cast<double>(j) * h;
    const double face_hi = static_cast<double>(j + 1) * h;
    const double w = profile.value(r[j]);
    diag[j] = (face_lo + face_hi) / (r[j] * h2) + m2 / (r[j] * r[j]) + 1.0 - c * w * w;
    if (j + 1 < nn) off[j] = -face_hi / (h2 * std::sqrt(r[j] * r[j + 1]));
  }

  std::vector<double> d = diag, e = off;
  e.push_back(0.0);
  lapack_int found = 0;
  std::vector<double> vals(nn);
  std::vector<double> z(nn * static_cast<std::size_t>(count));
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count, 0.0,
                                         &found, vals.data(), z.data(), n, support.data());
  if (info != 0 || found != count) {
    throw NumericalError("tridiagonal eigensolver failed (info " + std::to_string(info) + ")");
  }

  SpectrumReport rep;
  rep.op = op;
  rep.sector = sector;
  rep.r = r;
  for (lapack_int k = 0; k < found; ++k) {
    const double lambda = vals[static_cast<std::size_t>(k)];
    const double* phi = &z[static_cast<std::size_t>(k) * nn];
    double res2 = 0.0, norm2 = 0.0, peak = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < nn; ++j) {
      double s = diag[j] * phi[j];
      if (j > 0) s += off[j - 1] * phi[j - 1];
      if (j + 1 < nn) s += off[j] * phi[j + 1];
      res2 += (s - lambda * phi[j]) * (s - lambda * phi[j]);
      norm2 += phi[j] * phi[j];
      peak = std::max(peak, std::abs(phi[j]));
      if (j >= nn - nn / 20) tail = std::max(tail, std::abs(phi[j]));
    }
    // Modes at or above the continuum edge 1 are box modes and cannot decay;
    // only bound states are held to the decay test.
    if (lambda < 1.0 && tail > 1e-5 * peak) {
      throw AccuracyError("eigenvector " + std::to_string(k) + " has not decayed by r_max; increase r_max");
    }
    rep.eigenvalues.push_back(lambda);
    rep.residuals.push_back(std::sqrt(res2 / norm2));

    std::vector<double> psi(nn);
    std::size_t at_peak = 0;
    for (std::size_t j = 0; j < nn; ++j) {
      psi[j] = phi[j] / std::sqrt(r[j] * h * norm2);
      if (std::abs(psi[j]) > std::abs(psi[at_peak])) at_peak = j;
    }
    if (psi[at_peak] < 0.0) {
      for (auto& p : psi) p = -p;
    }
    rep.modes.push_back(std::move(psi));
  }

  double dot = 0.0, ww = 0.0;
  for (std::size_t j = 0; j < nn; ++j) {
    const double w = profile.value(r[j]);
    dot += r[j] * h * rep.modes.front()[j] * w;
    ww += r[j] * h * w * w;
  }
  rep.profile_cosine = std::abs(dot) / std::sqrt(ww);
  return rep;
}

}  // namespace rotbec
