#pragma once

#include <span>
#include <utility>

#include "onoff/dual/grid.hpp"
#include "onoff/params.hpp"

namespace onoff::dual {

/// Non-local branching mechanism of on/off SBM,
///   psi(z)(x,1) = c z(x,1) + (gamma/2) z(x,1)^2 - c z(x,0),
///   psi(z)(x,0) = c_tilde z(x,0) - c_tilde z(x,1),
/// i.e. a = (c, c_tilde), b = (gamma/2, 0) and a switching kernel moving
/// mass c (resp. c_tilde) to the other state at the same point. The Lipschitz
/// data are taken on the sup-norm ball of radius A.
struct BranchingMechanism {
  ModelParams params;
  double A = 1.0;

  double Q() const { return params.q_bound(); }
  /// Lipschitz constant of z -> z^2 on [-A, A].
  double L_A() const { return 2.0 * A; }
  double C_A() const { return Q() * (2.0 + L_A()); }

  /// Point evaluation (no ball check).
  std::pair<double, double> at(double z_active, double z_dormant) const;
  /// Nodewise evaluation; throws OutOfBall if |z| > A anywhere.
  void apply(std::span<const double> z_active, std::span<const double> z_dormant,
             std::span<double> out_active, std::span<double> out_dormant) const;
};

/// A = 2^n ||phi||, the a-priori bound on solutions built from n intervals.
double ball_radius(double phi_sup, int n_intervals);

DualField psi_eval(const BranchingMechanism& mech, const DualField& z);

}  // namespace onoff::dual
