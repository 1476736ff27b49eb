#include "onoff/dual/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "onoff/error.hpp"

namespace onoff::dual {

double pair_with_field(const FiniteMeasure& mu, const DualField& field) {
  if (mu.dim() != 1) throw BadDimension("pairing with a grid field needs d = 1");
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.weight * field.interpolate(a.position.front(), a.state);
  return s;
}

CascadeTable eps_cascade(const ModelParams& params, const TestFunction& phi, double t,
                         std::span<const double> eps_list, const FiniteMeasure& mu,
                         const PdeOptions& options) {
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw NonPositiveEpsilon("cascade epsilons must be > 0");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) {
      throw InvalidArgument("cascade epsilons must be strictly decreasing");
    }
  }
  PdeOptions opts = options;
  if (!opts.grid) opts.grid = auto_grid(phi, t, opts.dx, opts.margin_factor);

  CascadeTable table;
  table.t = t;
  const PdeResult limit = solve_spatial_dual_pde(params, phi, t, DualVariant::sbm, opts);
  table.limit_pairing = pair_with_field(mu, limit.field);
  table.limit_error_estimate = limit.error_estimate;
  const DualField phi_field = sample(phi, *opts.grid);

  for (double eps : eps_list) {
    opts.epsilon = eps;
    const PdeResult r = solve_spatial_dual_pde(params, phi, t, DualVariant::eps, opts);
    const DualField init = initial_dual_data(phi, *opts.grid, DualVariant::eps, eps);
    table.rows.push_back({eps, pair_with_field(mu, r.field), sup_difference(r.field, limit.field),
                          sup_difference(init, phi_field), r.error_estimate});
  }
  return table;
}

}  // namespace onoff::dual
