#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "onoff/params.hpp"
#include "onoff/random.hpp"
#include "onoff/stats.hpp"

namespace onoff::feller {

/// Total active mass p and total dormant mass q.
struct FellerState {
  double p = 0.0;
  double q = 0.0;
  double r() const { return p + q; }
};

/// Noise coefficient of the active mass: sqrt(gamma p) matches the generator
/// (gamma/2) p d^2/dp^2, the dual ODE and the particle-level variance;
/// (gamma/2) sqrt(p) is the alternative kept for comparison.
enum class NoiseVariant { generator_consistent, literal };

const char* to_string(NoiseVariant v);

struct SdeScheme {
  double dt = 1e-3;
  NoiseVariant variant = NoiseVariant::generator_consistent;
  /// A path counts as having hit zero once a recorded p is <= p_floor.
  double p_floor = 0.0;
};

double noise_coefficient(double p, const ModelParams& params, NoiseVariant variant);

struct StepResult {
  FellerState state;
  /// Euler proposal for p before clamping at 0.
  double proposal = 0.0;
};

/// One step: truncated Euler-Maruyama for p, exact exponential integrator
/// for q given the pre-step p. Both components of the result are >= 0.
StepResult feller_step(const FellerState& state, const ModelParams& params,
                       const SdeScheme& scheme, double gaussian);
StepResult feller_step(const FellerState& state, const ModelParams& params,
                       const SdeScheme& scheme, RandomSource& rng);

/// Pathwise extremes accumulated over every step, including the initial state.
struct PathSummary {
  bool hit = false;
  /// Time of the first hit; meaningful only when `hit`.
  double hit_time = 0.0;
  double min_proposal = 0.0;
  double min_p = 0.0;
  double min_q = 0.0;
  double min_r = 0.0;
  /// min over steps of q_t - q_0 exp(-c_tilde t).
  double min_seed_margin = 0.0;
  /// Time at which min_seed_margin is attained.
  double seed_margin_time = 0.0;
  FellerState final_state;
};

struct EnsembleOptions {
  std::uint64_t master_seed = 0;
  std::uint64_t first_stream = 0;
  unsigned workers = 1;
  /// Recording times; each is rounded to the step grid and must lie in [0, T].
  std::vector<double> observation_times;
  /// Stop integrating a path at its first hit (recorded values then freeze).
  bool stop_on_hit = false;
};

struct FellerEnsemble {
  ModelParams params;
  SdeScheme scheme;
  FellerState initial;
  double horizon = 0.0;
  std::size_t n_paths = 0;
  std::vector<double> times;
  /// Recorded values, laid out [time_index * n_paths + path].
  std::vector<double> p;
  std::vector<double> q;
  std::vector<PathSummary> paths;

  std::span<const double> p_at(std::size_t time_index) const;
  std::span<const double> q_at(std::size_t time_index) const;
  std::vector<double> r_at(std::size_t time_index) const;
};

/// Simulates n_paths independent paths on [0, T]; path k uses the stream
/// (master_seed, first_stream + k).
FellerEnsemble simulate_feller_ensemble(const ModelParams& params, const FellerState& initial,
                                        const SdeScheme& scheme, double T, std::size_t n_paths,
                                        const EnsembleOptions& options = {});

/// Sample mean and standard error of exp(-theta1 p - theta2 q) at a recorded time.
SampleSummary mgf(const FellerEnsemble& ensemble, std::size_t time_index, double theta1,
                  double theta2);

struct HitStats {
  std::size_t hits = 0;
  std::size_t n = 0;
  double fraction = 0.0;
  Interval wilson;
};

/// A path hits zero iff some pre-clamp proposal is <= 0 or some recorded p
/// is <= p_floor.
HitStats hit_zero_stats(const FellerEnsemble& ensemble, double p_floor);

struct FellerPath {
  std::vector<double> times;
  std::vector<FellerState> states;
};

/// Single path recorded at every step.
FellerPath simulate_feller_path(const ModelParams& params, const FellerState& initial,
                                const SdeScheme& scheme, double T, RandomSource& rng);

struct PersistenceResult {
  bool pass = true;
  std::optional<double> violation_time;
  double min_margin = 0.0;
};

/// Passes iff q_t >= q_0 exp(-c_tilde t) - tol and r_t > 0 at every recorded
/// time. Requires q_0 > 0 (InvalidArgument otherwise).
PersistenceResult persistence_check(const FellerPath& path, const ModelParams& params,
                                    double tol);

struct PersistenceSummary {
  std::size_t n_paths = 0;
  std::size_t bound_violations = 0;
  std::size_t zero_r_paths = 0;
  double worst_margin = 0.0;
};

/// Ensemble form of persistence_check using the per-step extremes.
PersistenceSummary persistence_summary(const FellerEnsemble& ensemble, double tol);

}  // namespace onoff::feller
