#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "onoff/bbm/particle_system.hpp"
#include "onoff/measure.hpp"
#include "onoff/params.hpp"
#include "onoff/stats.hpp"
#include "onoff/test_function.hpp"

namespace onoff::bbm {

/// Monte-Carlo plumbing shared by the particle ensembles. Replicate k uses the
/// stream (master_seed, first_stream + k).
struct McOptions {
  std::uint64_t master_seed = 0;
  std::uint64_t first_stream = 0;
  unsigned workers = 1;
  std::size_t population_cap = kDefaultPopulationCap;
  /// Start from poissonize(mu, epsilon) (true) or from exactly one particle
  /// per unit of atom weight / epsilon, rounded (false).
  bool poisson_start = true;
};

struct LaplaceEstimate {
  double estimate = 1.0;
  double std_error = 0.0;
  std::size_t n_reps = 0;
};

/// Estimates E exp(-<Z_t^eps, phi>) for every phi in `phis` from one shared
/// set of replicates (common random numbers), so the estimates are coupled.
std::vector<LaplaceEstimate> laplace_functional_mc(const FiniteMeasure& mu,
                                                   std::span<const TestFunction> phis, double t,
                                                   double epsilon, std::size_t n_reps,
                                                   const ModelParams& params,
                                                   const McOptions& options = {});

LaplaceEstimate laplace_functional_mc(const FiniteMeasure& mu, const TestFunction& phi, double t,
                                      double epsilon, std::size_t n_reps,
                                      const ModelParams& params, const McOptions& options = {});

/// Initial population of one replicate.
Population initial_population(const FiniteMeasure& mu, double epsilon, RandomSource& rng,
                              bool poisson_start);

struct MassMoments {
  double time = 0.0;
  SampleSummary active;
  SampleSummary dormant;
  SampleSummary total;
};

/// Ensemble moments of (eps n_a, eps n_d) at each observation time.
std::vector<MassMoments> total_mass_ensemble(const FiniteMeasure& mu, double epsilon,
                                             std::span<const double> observation_times,
                                             std::size_t n_reps, const ModelParams& params,
                                             const McOptions& options = {});

struct OccupationEstimate {
  SampleSummary dormant_fraction;
};

/// Fraction of [0, t] a single particle started in `start` spends dormant,
/// with branching switched off (gamma is ignored). Exact: the two-state chain
/// is simulated event by event.
OccupationEstimate dormant_occupation(const ModelParams& params, State start, double t,
                                      std::size_t n_reps, const McOptions& options = {});

}  // namespace onoff::bbm
