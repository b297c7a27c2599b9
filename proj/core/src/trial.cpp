#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rotbec/error.hpp"
#include "rotbec/minimizer.hpp"

namespace rotbec {

double bump_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = r - 1.0;
  return psi(1.0 - t) / (psi(1.0 - t) + psi(t));
}

TrialScan trial_energy_scan(const GpProblem& prob, const std::vector<double>& tau_values, Vec2 x0,
                            const TrialScanConfig& cfg, const Townes& townes) {
  if (tau_values.size() < 2) throw ConfigError("trial scan needs at least two tau values");
  std::vector<double> taus = tau_values;
  std::sort(taus.begin(), taus.end());
  const double half_omega = 0.5 * prob.omega();
  const Vec2 x0p = x0.perp();

  TrialScan scan;
  scan.min_energy = std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    if (!(tau > 0.0)) throw ConfigError("tau values must be positive");
    const Grid2D grid(cfg.n, std::max(cfg.box_factor / tau, 2.5), x0);
    if (grid.dx() > 1.0 / (8.0 * tau)) {
      std::ostringstream os;
      os << "tau = " << tau << " is not resolved: need 8 points per 1/tau, grid spacing " << grid.dx();
      throw ConfigError(os.str());
    }
    Field2D u(grid);
    auto& d = u.data_mut();
    const int n = grid.n();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec2 p = grid.point(i, j);
        const double r = (p - x0).norm();
        const double amp = bump_cutoff(r) * townes.profile.value(tau * r);
        d[grid.index(i, j)] = std::polar(amp, half_omega * p.dot(x0p));
      }
    }
    normalize_in_place(u);
    const GpOperator op(grid, prob);
    const double energy = op.evaluate(u).total;
    scan.rows.push_back({tau, energy});
    scan.min_energy = std::min(scan.min_energy, energy);
  }

  // Least squares of energy against tau^2 over the upper half of the range.
  const std::size_t first = std::min(taus.size() / 2, taus.size() - 2);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto m = static_cast<double>(taus.size() - first);
  for (std::size_t k = first; k < scan.rows.size(); ++k) {
    const double x = scan.rows[k].tau * scan.rows[k].tau;
    const double y = scan.rows[k].energy;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  scan.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return scan;
}

}  // namespace rotbec
