#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "onoff/dual/grid.hpp"
#include "onoff/dual/mechanism.hpp"
#include "onoff/test_function.hpp"

namespace onoff::dual {

/// Exact transition operator exp(h/2 D2) of the grid Laplacian with Neumann
/// ghost nodes, i.e. the heat semigroup of the semi-discrete problem. D2 is
/// self-adjoint for trapezoid weights, so it is diagonalised once.
class HeatSemigroup {
 public:
  HeatSemigroup(const Grid& grid, double h);
  ~HeatSemigroup();
  HeatSemigroup(HeatSemigroup&&) noexcept;
  HeatSemigroup& operator=(HeatSemigroup&&) noexcept;

  void apply(std::span<const double> in, std::span<double> out) const;
  double step() const { return h_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double h_;
};

/// How the expectation over the motion (Brownian when active, frozen when
/// dormant) inside the Picard map is computed.
enum class InnerExpectation { pde, feynman_kac };

const char* to_string(InnerExpectation inner);

struct PicardOptions {
  InnerExpectation inner = InnerExpectation::pde;
  /// Time steps per interval for the trapezoid rule.
  std::size_t substeps = 16;
  double tol = 1e-8;
  std::size_t max_iterations = 200;
  /// Brownian paths per interval for feynman_kac; antithetic pairs, fixed
  /// across iterates (common random numbers).
  std::size_t fk_paths = 4096;
  std::uint64_t fk_seed = 0;
};

struct PicardResult {
  /// Solution at the far end of the interval.
  DualField field;
  std::size_t iterations = 0;
  /// Delta-norm distance between successive iterates.
  std::vector<double> differences;
  /// differences[k] / differences[k-1], recorded while the previous
  /// difference is above round-off level.
  std::vector<double> contraction_ratios;
  double max_ratio = 0.0;
  /// Largest |z| seen over the interval at the fixed point.
  double max_abs = 0.0;
};

/// Fixed point of z(tau) = P_tau f - int_0^tau P_{tau-s} psi(z(s)) ds on an
/// interval of the given length (time to go), with terminal data f. Throws
/// ContractionViolated when length * C_A > 1/2, OutOfBall when an iterate
/// leaves the A-ball, NoConvergence after max_iterations.
PicardResult picard_solve_interval(const BranchingMechanism& mech, const DualField& terminal,
                                   double length, const PicardOptions& options = {});

struct GlueResult {
  DualField field;
  double A = 0.0;
  double C_A = 0.0;
  double interval_length = 0.0;
  std::vector<PicardResult> stages;
  double max_abs = 0.0;
};

/// Backward induction over n equal intervals: each interval's solution feeds
/// the next as terminal data. A = 2^n phi_sup.
GlueResult glue_intervals(const ModelParams& params, const DualField& terminal, double phi_sup,
                          double T, int n_intervals, const PicardOptions& options = {});

/// sbm dual of phi on the given grid.
GlueResult glue_intervals(const ModelParams& params, const TestFunction& phi, const Grid& grid,
                          double T, int n_intervals, const PicardOptions& options = {});

/// Largest T admissible with n intervals: T C_A / n <= 1/2.
double max_glue_horizon(const ModelParams& params, double phi_sup, int n_intervals);

}  // namespace onoff::dual
