#pragma once

#include <cstddef>
#include <vector>

#include "onoff/params.hpp"
#include "onoff/test_function.hpp"

namespace onoff::dual {

/// Uniform 1-D lattice x_j = x_min + j dx, j = 0..n_cells.
struct Grid {
  double x_min = 0.0;
  double dx = 0.02;
  std::size_t n_cells = 0;

  static Grid centered(double center, double half_width, double dx);

  std::size_t size() const { return n_cells + 1; }
  double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }
  double x_max() const { return x(n_cells); }
  bool operator==(const Grid&) const = default;
};

/// Default truncation margin, in units of sqrt(T), beyond the region where
/// phi exceeds 1e-12 of its sup.
inline constexpr double kDefaultMarginFactor = 6.5;
inline constexpr double kEffectiveRadiusTol = 1e-12;

/// Domain centred on phi: effective radius plus margin_factor sqrt(T). For a
/// spatially constant phi, whose solution is flat, a unit half-width is used.
Grid auto_grid(const TestFunction& phi, double T, double dx,
               double margin_factor = kDefaultMarginFactor);

/// Pair of profiles (V(., 1), V(., 0)) on a grid at time `time`.
struct DualField {
  Grid grid;
  std::vector<double> active;
  std::vector<double> dormant;
  double time = 0.0;

  DualField() = default;
  DualField(const Grid& g, double t);

  std::vector<double>& component(State s) { return s == State::active ? active : dormant; }
  const std::vector<double>& component(State s) const {
    return s == State::active ? active : dormant;
  }
  double sup_norm() const;
  double min_value() const;
  bool finite() const;
  /// Linear interpolation; outside the grid the boundary value is used.
  double interpolate(double x, State s) const;
};

/// Nodewise values of phi.
DualField sample(const TestFunction& phi, const Grid& grid);

/// Sup-norm distance over a's nodes, interpolating b when the grids differ.
double sup_difference(const DualField& a, const DualField& b);

}  // namespace onoff::dual
