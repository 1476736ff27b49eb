#include "onoff/dual/total_mass_dual.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "onoff/error.hpp"

namespace onoff::dual {

namespace {

using Vec = std::array<double, 2>;

Vec rhs(const ModelParams& p, const Vec& y) {
  return {-0.5 * p.gamma * y[0] * y[0] + p.c * (y[1] - y[0]), p.c_tilde * (y[0] - y[1])};
}

TotalMassDualPath rk4(const ModelParams& p, double theta1, double theta2, double T,
                      std::size_t n) {
  const double h = T / static_cast<double>(n);
  TotalMassDualPath out;
  out.dt = h;
  out.t.reserve(n + 1);
  out.u.reserve(n + 1);
  out.v.reserve(n + 1);
  Vec y{theta1, theta2};
  out.t.push_back(0.0);
  out.u.push_back(y[0]);
  out.v.push_back(y[1]);
  auto axpy = [](const Vec& a, double s, const Vec& b) {
    return Vec{a[0] + s * b[0], a[1] + s * b[1]};
  };
  for (std::size_t k = 1; k <= n; ++k) {
    const Vec k1 = rhs(p, y);
    const Vec k2 = rhs(p, axpy(y, 0.5 * h, k1));
    const Vec k3 = rhs(p, axpy(y, 0.5 * h, k2));
    const Vec k4 = rhs(p, axpy(y, h, k3));
    for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.t.push_back(static_cast<double>(k) * h);
    out.u.push_back(y[0]);
    out.v.push_back(y[1]);
  }
  return out;
}

}  // namespace

TotalMassDualPath solve_total_mass_dual(const ModelParams& params, double theta1, double theta2,
                                        double T, double dt, double tol, double dt_min) {
  if (!(theta1 >= 0.0) || !(theta2 >= 0.0)) throw InvalidArgument("theta must be >= 0");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (!(T >= 0.0)) throw InvalidArgument("T must be >= 0");
  if (T == 0.0) {
    TotalMassDualPath out;
    out.t = {0.0};
    out.u = {theta1};
    out.v = {theta2};
    out.dt = dt;
    return out;
  }
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt)));
  TotalMassDualPath coarse = rk4(params, theta1, theta2, T, n);
  for (int halvings = 1;; ++halvings) {
    if (T / static_cast<double>(2 * n) < dt_min) {
      throw NonConvergent("total-mass dual RK4 did not reach tolerance before dt_min");
    }
    TotalMassDualPath fine = rk4(params, theta1, theta2, T, 2 * n);
    double gap = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      gap = std::max({gap, std::abs(fine.u[2 * k] - coarse.u[k]),
                      std::abs(fine.v[2 * k] - coarse.v[k])});
    }
    if (gap < tol) {
      fine.halvings = halvings;
      fine.refinement_gap = gap;
      return fine;
    }
    coarse = std::move(fine);
    n *= 2;
  }
}

}  // namespace onoff::dual
