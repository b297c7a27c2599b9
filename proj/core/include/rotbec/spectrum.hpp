#pragma once

#include <vector>

#include "rotbec/townes.hpp"

namespace rotbec {

/// Radial linearizations about the profile:
///   L     = -Lap + 1 - w^2
///   L_hat = -Lap + 1 - 3 w^2
enum class LinearOp { L, L_hat };

struct SpectrumReport {
  LinearOp op = LinearOp::L;
  int sector = 0;                          ///< angular index m
  std::vector<double> eigenvalues;         ///< ascending
  std::vector<double> residuals;           ///< ||(S - lambda) phi|| / ||phi|| per pair
  std::vector<double> r;                   ///< cell centers
  std::vector<std::vector<double>> modes;  ///< radial functions psi(r), unit weighted norm
  double profile_cosine = 0.0;             ///< weighted cosine of the first mode against w
};

/// Lowest `count` eigenpairs of -psi'' - psi'/r + m^2/r^2 psi + (1 - c w^2) psi
/// with Dirichlet data at r_max, discretized on cell centers r_j = (j - 1/2) h
/// in flux form and symmetrized by phi = sqrt(r) psi.
///
/// Throws AccuracyError when a returned bound state (eigenvalue below the
/// continuum edge 1) has not decayed by r_max.
[[nodiscard]] SpectrumReport linearized_spectrum(const RadialProfile& profile, LinearOp op, int sector, int count,
                                                 double h = 0.01, double r_max = 20.0);

}  // namespace rotbec
