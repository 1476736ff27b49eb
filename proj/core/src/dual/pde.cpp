#include "onoff/dual/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "onoff/error.hpp"

namespace onoff::dual {

const char* to_string(DualVariant v) {
  switch (v) {
    case DualVariant::sbm:
      return "sbm-dual";
    case DualVariant::eps:
      return "eps-dual";
    case DualVariant::bbm:
      return "bbm-dual";
  }
  return "unknown";
}

DualField initial_dual_data(const TestFunction& phi, const Grid& grid, DualVariant variant,
                            double epsilon) {
  DualField f = sample(phi, grid);
  auto map = [&](auto fn) {
    for (double& v : f.active) v = fn(v);
    for (double& v : f.dormant) v = fn(v);
  };
  switch (variant) {
    case DualVariant::sbm:
      break;
    case DualVariant::eps:
      if (!(epsilon > 0.0)) throw NonPositiveEpsilon("epsilon must be > 0");
      map([epsilon](double v) { return -std::expm1(-epsilon * v) / epsilon; });
      break;
    case DualVariant::bbm:
      map([](double v) { return std::exp(-v); });
      break;
  }
  return f;
}

namespace {

struct Rhs {
  ModelParams p;
  DualVariant variant;
  double k_bbm;
  double inv_dx2;

  void operator()(const std::vector<double>& a, const std::vector<double>& d,
                  std::vector<double>& ra, std::vector<double>& rd) const {
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
      double lap;
      if (n == 1) {
        lap = 0.0;
      } else if (j == 0) {
        lap = 2.0 * (a[1] - a[0]) * inv_dx2;
      } else if (j == n - 1) {
        lap = 2.0 * (a[n - 2] - a[n - 1]) * inv_dx2;
      } else {
        lap = (a[j - 1] - 2.0 * a[j] + a[j + 1]) * inv_dx2;
      }
      const double reaction = variant == DualVariant::bbm
                                  ? k_bbm * 0.5 * (1.0 - a[j]) * (1.0 - a[j])
                                  : -0.5 * p.gamma * a[j] * a[j];
      ra[j] = 0.5 * lap + reaction + p.c * (d[j] - a[j]);
      rd[j] = p.c_tilde * (a[j] - d[j]);
    }
  }
};

}  // namespace

DualField evolve_dual(const ModelParams& params, const DualField& initial, double T,
                      DualVariant variant, const PdeOptions& options, std::size_t* steps_taken,
                      double* dt_used) {
  if (!(T >= 0.0)) throw InvalidArgument("T must be >= 0");
  const double dx = initial.grid.dx;
  const double dt_max = options.cfl * dx * dx;
  if (options.dt > dt_max * (1.0 + 1e-12)) {
    throw CFLViolation("dt = " + std::to_string(options.dt) + " exceeds cfl dx^2 = " +
                       std::to_string(dt_max));
  }
  const double dt_target = options.dt > 0.0 ? options.dt : dt_max;
  const auto n_steps =
      T > 0.0 ? static_cast<std::size_t>(std::ceil(T / dt_target - 1e-9)) : std::size_t{0};
  const double dt = n_steps > 0 ? T / static_cast<double>(n_steps) : 0.0;
  if (steps_taken) *steps_taken = n_steps;
  if (dt_used) *dt_used = dt;

  const Rhs rhs{params, variant,
                options.bbm_reaction == BbmReaction::particle_consistent ? params.gamma
                                                                         : 0.5 * params.gamma,
                1.0 / (dx * dx)};
  DualField f = initial;
  const std::size_t n = f.active.size();
  std::vector<double> a1(n), d1(n), a2(n), d2(n), ra(n), rd(n);
  for (std::size_t s = 0; s < n_steps; ++s) {
    rhs(f.active, f.dormant, ra, rd);
    for (std::size_t j = 0; j < n; ++j) {
      a1[j] = f.active[j] + dt * ra[j];
      d1[j] = f.dormant[j] + dt * rd[j];
    }
    rhs(a1, d1, ra, rd);
    for (std::size_t j = 0; j < n; ++j) {
      a2[j] = 0.75 * f.active[j] + 0.25 * (a1[j] + dt * ra[j]);
      d2[j] = 0.75 * f.dormant[j] + 0.25 * (d1[j] + dt * rd[j]);
    }
    rhs(a2, d2, ra, rd);
    for (std::size_t j = 0; j < n; ++j) {
      f.active[j] = f.active[j] / 3.0 + 2.0 / 3.0 * (a2[j] + dt * ra[j]);
      f.dormant[j] = f.dormant[j] / 3.0 + 2.0 / 3.0 * (d2[j] + dt * rd[j]);
    }
  }
  f.time = initial.time + T;
  if (!f.finite()) throw NonConvergent("dual field became non-finite");
  return f;
}

PdeResult solve_spatial_dual_pde(const ModelParams& params, const TestFunction& phi, double T,
                                 DualVariant variant, const PdeOptions& options) {
  if (params.dim != 1) throw BadDimension("the spatial dual solver supports d = 1 only");
  if (!phi.is_continuous()) {
    throw InvalidArgument("the spatial dual solver needs a continuous test function");
  }
  if (!phi.center().empty() && phi.center().size() != 1) {
    throw BadDimension("test function centre must be one-dimensional");
  }
  const Grid grid = options.grid ? *options.grid : auto_grid(phi, T, options.dx,
                                                             options.margin_factor);
  PdeResult res;
  res.field = evolve_dual(params, initial_dual_data(phi, grid, variant, options.epsilon), T,
                          variant, options, &res.steps, &res.dt);

  const double far = variant == DualVariant::bbm ? 1.0 : 0.0;
  const std::size_t last = grid.size() - 1;
  for (State s : {State::active, State::dormant}) {
    const auto& v = res.field.component(s);
    res.boundary_deviation =
        std::max({res.boundary_deviation, std::abs(v[0] - far), std::abs(v[last] - far)});
  }
  if (options.check_leak && !phi.is_spatially_constant() &&
      res.boundary_deviation > kLeakTolerance * phi.sup_bound()) {
    throw BoundaryLeak("boundary deviation " + std::to_string(res.boundary_deviation) +
                       " exceeds 1e-8 ||phi||; widen the domain");
  }

  res.error_estimate = std::numeric_limits<double>::quiet_NaN();
  if (options.richardson) {
    const Grid fine_grid{grid.x_min, 0.5 * grid.dx, 2 * grid.n_cells};
    PdeOptions fine_opts = options;
    fine_opts.dt = 0.0;
    const DualField fine = evolve_dual(
        params, initial_dual_data(phi, fine_grid, variant, options.epsilon), T, variant, fine_opts);
    double gap = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      gap = std::max({gap, std::abs(res.field.active[j] - fine.active[2 * j]),
                      std::abs(res.field.dormant[j] - fine.dormant[2 * j])});
    }
    res.refinement_gap = gap;
    res.error_estimate = 4.0 / 3.0 * gap;
  }
  return res;
}

}  // namespace onoff::dual
