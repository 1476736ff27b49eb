#pragma once

#include <span>
#include <vector>

#include "onoff/dual/pde.hpp"
#include "onoff/measure.hpp"

namespace onoff::dual {

struct CascadeRow {
  double epsilon = 0.0;
  /// <mu, v_t^eps phi>.
  double pairing = 0.0;
  /// sup over the grid of |v_t^eps phi - V_t phi|.
  double sup_gap = 0.0;
  /// Same gap for the initial data, (1 - e^{-eps phi})/eps - phi.
  double initial_gap = 0.0;
  double error_estimate = 0.0;
};

struct CascadeTable {
  double t = 0.0;
  /// <mu, V_t phi>.
  double limit_pairing = 0.0;
  double limit_error_estimate = 0.0;
  std::vector<CascadeRow> rows;
};

/// <mu, field> for a one-dimensional atomic measure, by interpolation.
double pair_with_field(const FiniteMeasure& mu, const DualField& field);

/// Solves the eps dual for every eps (positive, strictly decreasing) and the
/// sbm dual once, all on the same grid.
CascadeTable eps_cascade(const ModelParams& params, const TestFunction& phi, double t,
                         std::span<const double> eps_list, const FiniteMeasure& mu,
                         const PdeOptions& options = {});

}  // namespace onoff::dual
