#pragma once

#include <vector>

#include "onoff/params.hpp"

namespace onoff::dual {

/// Sampled solution of
///   u' = -(gamma/2) u^2 + c (v - u),  v' = c_tilde (u - v),
///   u(0) = theta1, v(0) = theta2.
struct TotalMassDualPath {
  std::vector<double> t;
  std::vector<double> u;
  std::vector<double> v;
  double dt = 0.0;
  int halvings = 0;
  /// Sup difference between the accepted run and the previous coarser one.
  double refinement_gap = 0.0;

  double u_end() const { return u.back(); }
  double v_end() const { return v.back(); }
};

/// Classical RK4, halving dt until two successive runs differ by less than
/// `tol` at the coarse sample times. Throws NonConvergent if dt drops below
/// dt_min first.
TotalMassDualPath solve_total_mass_dual(const ModelParams& params, double theta1, double theta2,
                                        double T, double dt, double tol = 1e-8,
                                        double dt_min = 1e-7);

}  // namespace onoff::dual
