#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "onoff/feller/feller.hpp"
#include "onoff/params.hpp"
#include "onoff/stats.hpp"

namespace onoff::analytics {

using Matrix2 = std::array<std::array<double, 2>, 2>;

Matrix2 multiply(const Matrix2& a, const Matrix2& b);
double max_abs_difference(const Matrix2& a, const Matrix2& b);

/// Closed-form solution of g' = c_tilde h - c g, h' = c g - c_tilde h.
std::pair<double, double> mean_solution(const ModelParams& params, double g0, double h0,
                                        double t);

/// Rows are mean_solution from (1, 0) and (0, 1): row i holds (E p_t, E q_t)
/// started from unit mass in state i (active first).
struct MeanMatrix {
  double t = 0.0;
  Matrix2 entries{};
};

MeanMatrix mean_matrix(const ModelParams& params, double t);

/// H(lambda) = int_0^inf e^{-lambda t} M(t) dt
///           = [lambda + c_tilde, c; c_tilde, lambda + c] / (lambda^2 + lambda (c + c_tilde)).
struct ResolventMatrix {
  double lambda = 0.0;
  Matrix2 entries{};
};

/// Throws NonPositiveLambda for lambda <= 0.
ResolventMatrix resolvent(const ModelParams& params, double lambda);

struct ResolventQuadrature {
  Matrix2 entries{};
  /// Truncation point with tail below `tail_tol`.
  double t_star = 0.0;
  double max_abs_difference = 0.0;
};

/// Gauss-Kronrod evaluation of int_0^{T*} e^{-lambda t} M(t) dt compared with
/// the closed form.
ResolventQuadrature resolvent_quadrature(const ModelParams& params, double lambda,
                                         double tail_tol = 1e-10);

/// W_t = e^{lambda t} (p_t H_{1j} + q_t H_{2j}), j in {1, 2}.
double supermartingale_W(double t, double p, double q, const ResolventMatrix& H, int j);

std::vector<double> supermartingale_W(const feller::FellerPath& path, const ModelParams& params,
                                      double lambda, int j);

struct WDecayReport {
  double lambda = 0.0;
  int j = 1;
  std::vector<double> times;
  std::vector<SampleSummary> W;
  /// Closed-form E W_t = e^{lambda t} x M(t) H_{.j}.
  std::vector<double> expected;
  OrderingReport ordering;
};

/// Ensemble means of W at the ensemble's recording times and the 3-sigma
/// nonincreasing test.
WDecayReport w_decay_report(const feller::FellerEnsemble& ensemble, double lambda, int j,
                            double z = 3.0);

/// Boundary attainment certificate for {p = 0} at x = (0, y). The verdict is
/// 0 <= y <= 1/(2 c_tilde). The diffusion data use a(x) = diag(gamma x1, 0),
/// so a grad p1 = h p1 with h = (gamma, 0); the classification's strict
/// condition 2 G p1(x) < h . grad p1 then reads 2 c_tilde y < gamma.
struct BoundaryCertificate {
  ModelParams params;
  double y = 0.0;
  bool drift_inward = false;
  bool speed_bound = false;
  bool pass = false;
  double threshold = 0.0;
  /// G p1 at (0, y) = c_tilde y.
  double generator_p1 = 0.0;
  std::array<double, 2> h{};
  Matrix2 diffusion{};
  /// 2 G p1 - h . grad p1 < 0 with the generator-consistent h.
  bool classification_strict = false;
  double classification_threshold = 0.0;
  std::string note;
};

/// Requires y >= 0 (InvalidArgument otherwise).
BoundaryCertificate boundary_certificate(const ModelParams& params, double y);

}  // namespace onoff::analytics
