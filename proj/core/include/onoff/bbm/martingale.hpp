#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "onoff/bbm/ensemble.hpp"
#include "onoff/bbm/particle_system.hpp"
#include "onoff/stats.hpp"
#include "onoff/test_function.hpp"

namespace onoff::bbm {

using Laplacian = std::function<double(std::span<const double>, State)>;

/// M_t(phi) = <Z_t,phi> - <Z_0,phi> - int_0^t <Z_s, L phi> ds and the
/// predicted quadratic variation gamma int_0^t <Z_s, 1_{i=1} phi^2> ds, where
///   L phi(x,1) = 1/2 Lap phi(x,1) + c (phi(x,0) - phi(x,1)),
///   L phi(x,0) = c_tilde (phi(x,1) - phi(x,0)).
/// Time integrals use the trapezoid rule over the snapshot times, which must
/// carry particle dumps; index 0 is the time origin.
struct MartingaleSeries {
  std::vector<double> times;
  std::vector<double> residual;
  std::vector<double> qv_predictor;
};

MartingaleSeries martingale_residual(const Trajectory& trajectory, const TestFunction& phi,
                                     const Laplacian& phi_laplacian, const ModelParams& params);

/// Uses phi's own Laplacian; throws MissingDerivative if it has none.
MartingaleSeries martingale_residual(const Trajectory& trajectory, const TestFunction& phi,
                                     const ModelParams& params);

/// L phi at one point.
double generator_action(const TestFunction& phi, const Laplacian& phi_laplacian,
                        const ModelParams& params, std::span<const double> x, State s);

struct MartingaleReport {
  double t = 0.0;
  std::size_t n_obs = 0;
  SampleSummary residual;
  SampleSummary qv_predictor;
};

/// Runs n_reps particle replicates from poissonize(mu, epsilon) observed on a
/// uniform grid of n_obs steps over [0, t] and summarises M_t and the
/// predictor at t.
MartingaleReport martingale_ensemble(const FiniteMeasure& mu, const TestFunction& phi,
                                     double epsilon, double t, std::size_t n_obs,
                                     std::size_t n_reps, const ModelParams& params,
                                     const McOptions& options = {});

}  // namespace onoff::bbm
