#include "onoff/dual/mechanism.hpp"

#include <cmath>
#include <string>

#include "onoff/error.hpp"

namespace onoff::dual {

std::pair<double, double> BranchingMechanism::at(double z1, double z0) const {
  const ModelParams& p = params;
  return {p.c * z1 + 0.5 * p.gamma * z1 * z1 - p.c * z0, p.c_tilde * (z0 - z1)};
}

void BranchingMechanism::apply(std::span<const double> z1, std::span<const double> z0,
                               std::span<double> out1, std::span<double> out0) const {
  const double limit = A * (1.0 + 1e-12);
  for (std::size_t j = 0; j < z1.size(); ++j) {
    if (!(std::abs(z1[j]) <= limit) || !(std::abs(z0[j]) <= limit)) {
      throw OutOfBall("field value outside the ball of radius " + std::to_string(A));
    }
    const auto [a, b] = at(z1[j], z0[j]);
    out1[j] = a;
    out0[j] = b;
  }
}

double ball_radius(double phi_sup, int n_intervals) {
  if (n_intervals < 1) throw InvalidArgument("n_intervals must be >= 1");
  return std::ldexp(phi_sup, n_intervals);
}

DualField psi_eval(const BranchingMechanism& mech, const DualField& z) {
  DualField out(z.grid, z.time);
  mech.apply(z.active, z.dormant, out.active, out.dormant);
  return out;
}

}  // namespace onoff::dual
