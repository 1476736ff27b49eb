#pragma once

#include <cstddef>
#include <optional>

#include "onoff/dual/grid.hpp"
#include "onoff/params.hpp"
#include "onoff/test_function.hpp"

namespace onoff::dual {

/// sbm: V' = 1/2 V1'' - (gamma/2) V1^2 + c (V0 - V1), V0' = c_tilde (V1 - V0), V(0) = phi.
/// eps: same system with V(0) = (1 - exp(-eps phi)) / eps.
/// bbm: u' = 1/2 u1'' + k (1/2 + 1/2 u1^2 - u1) + c (u0 - u1), u0' = c_tilde (u1 - u0),
///      u(0) = exp(-phi), with k set by BbmReaction.
enum class DualVariant { sbm, eps, bbm };

const char* to_string(DualVariant v);

/// Branching-rate factor k of the bbm dual: gamma matches particles that
/// branch at rate gamma (first-event decomposition); gamma/2 is the
/// alternative normalisation.
enum class BbmReaction { particle_consistent, half_rate };

inline constexpr double kDefaultCfl = 0.4;
inline constexpr double kLeakTolerance = 1e-8;

struct PdeOptions {
  double dx = 0.02;
  /// Time step; 0 selects the largest step with dt <= cfl dx^2 dividing T.
  double dt = 0.0;
  double cfl = kDefaultCfl;
  double epsilon = 0.1;
  BbmReaction bbm_reaction = BbmReaction::particle_consistent;
  /// Overrides the automatic domain.
  std::optional<Grid> grid;
  double margin_factor = kDefaultMarginFactor;
  /// Also solve with dx/2 and report a grid-refinement error estimate.
  bool richardson = true;
  bool check_leak = true;
};

struct PdeResult {
  DualField field;
  /// Estimated sup error of `field` from the dx vs dx/2 comparison
  /// (4/3 of the gap for a second-order scheme); NaN when not computed.
  double error_estimate = 0.0;
  double refinement_gap = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;
  /// max over boundary nodes of |field - far-field value|.
  double boundary_deviation = 0.0;
};

/// Initial data of the given variant.
DualField initial_dual_data(const TestFunction& phi, const Grid& grid, DualVariant variant,
                            double epsilon);

/// Method of lines from arbitrary initial data on its grid: centred second
/// difference with Neumann ghost nodes for the active field, SSP-RK3 in time.
/// Throws CFLViolation if options.dt exceeds cfl dx^2.
DualField evolve_dual(const ModelParams& params, const DualField& initial, double T,
                      DualVariant variant, const PdeOptions& options = {},
                      std::size_t* steps_taken = nullptr, double* dt_used = nullptr);

/// Solves the chosen dual up to T. Requires d = 1 and a continuous phi.
/// Throws BoundaryLeak if a boundary node departs from the far-field value
/// (0, or 1 for bbm) by more than 1e-8 ||phi||.
PdeResult solve_spatial_dual_pde(const ModelParams& params, const TestFunction& phi, double T,
                                 DualVariant variant, const PdeOptions& options = {});

}  // namespace onoff::dual
