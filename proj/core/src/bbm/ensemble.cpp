#include "onoff/bbm/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "onoff/error.hpp"
#include "onoff/parallel.hpp"
#include "onoff/random.hpp"

namespace onoff::bbm {

Population initial_population(const FiniteMeasure& mu, double epsilon, RandomSource& rng,
                              bool poisson_start) {
  if (poisson_start) return poissonize(mu, epsilon, rng);
  if (!(epsilon > 0.0)) throw NonPositiveEpsilon("epsilon must be > 0");
  Population pop;
  pop.dim = mu.dim();
  pop.particle_mass = epsilon;
  for (const Atom& a : mu.atoms()) {
    const auto n = static_cast<std::size_t>(std::llround(a.weight / epsilon));
    for (std::size_t k = 0; k < n; ++k) pop.push_back(a.position, a.state);
  }
  return pop;
}

std::vector<LaplaceEstimate> laplace_functional_mc(const FiniteMeasure& mu,
                                                   std::span<const TestFunction> phis, double t,
                                                   double epsilon, std::size_t n_reps,
                                                   const ModelParams& params,
                                                   const McOptions& options) {
  if (n_reps < 2) throw InvalidArgument("laplace_functional_mc needs n_reps >= 2");
  if (!(t >= 0.0)) throw InvalidArgument("t must be >= 0");
  const std::size_t m = phis.size();
  std::vector<double> samples(n_reps * m);
  parallel_for(n_reps, options.workers, [&](std::size_t rep) {
    RandomSource rng(options.master_seed, options.first_stream + rep);
    ParticleSystem sys(params, initial_population(mu, epsilon, rng, options.poisson_start),
                       options.population_cap);
    simulate_until(sys, t, rng, {});
    sys.sync(rng);
    const Population pop = sys.population();
    for (std::size_t j = 0; j < m; ++j) {
      samples[j * n_reps + rep] = std::exp(-pair_integral(pop, phis[j]));
    }
  });
  std::vector<LaplaceEstimate> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const SampleSummary s =
        summarize(std::span<const double>(samples.data() + j * n_reps, n_reps));
    out.push_back({s.mean, s.std_error, n_reps});
  }
  return out;
}

LaplaceEstimate laplace_functional_mc(const FiniteMeasure& mu, const TestFunction& phi, double t,
                                      double epsilon, std::size_t n_reps,
                                      const ModelParams& params, const McOptions& options) {
  return laplace_functional_mc(mu, std::span<const TestFunction>(&phi, 1), t, epsilon, n_reps,
                               params, options)
      .front();
}

std::vector<MassMoments> total_mass_ensemble(const FiniteMeasure& mu, double epsilon,
                                             std::span<const double> observation_times,
                                             std::size_t n_reps, const ModelParams& params,
                                             const McOptions& options) {
  if (n_reps < 2) throw InvalidArgument("total_mass_ensemble needs n_reps >= 2");
  if (observation_times.empty()) return {};
  const std::size_t m = observation_times.size();
  std::vector<double> active(n_reps * m), dormant(n_reps * m), total(n_reps * m);
  parallel_for(n_reps, options.workers, [&](std::size_t rep) {
    RandomSource rng(options.master_seed, options.first_stream + rep);
    ParticleSystem sys(params, initial_population(mu, epsilon, rng, options.poisson_start),
                       options.population_cap);
    const Trajectory traj =
        simulate_until(sys, observation_times.back(), rng, observation_times);
    for (std::size_t j = 0; j < m; ++j) {
      active[j * n_reps + rep] = traj[j].active_mass;
      dormant[j * n_reps + rep] = traj[j].dormant_mass;
      total[j * n_reps + rep] = traj[j].active_mass + traj[j].dormant_mass;
    }
  });
  std::vector<MassMoments> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto slice = [&](const std::vector<double>& v) {
      return std::span<const double>(v.data() + j * n_reps, n_reps);
    };
    out[j] = {observation_times[j], summarize(slice(active)), summarize(slice(dormant)),
              summarize(slice(total))};
  }
  return out;
}

OccupationEstimate dormant_occupation(const ModelParams& params, State start, double t,
                                      std::size_t n_reps, const McOptions& options) {
  if (n_reps < 2) throw InvalidArgument("dormant_occupation needs n_reps >= 2");
  ModelParams p = params;
  p.gamma = 0.0;
  std::vector<double> fraction(n_reps);
  parallel_for(n_reps, options.workers, [&](std::size_t rep) {
    RandomSource rng(options.master_seed, options.first_stream + rep);
    ParticleSystem sys(p, 1.0, options.population_cap);
    sys.add(std::vector<double>(static_cast<std::size_t>(p.dim), 0.0), start);
    double dormant_time = 0.0;
    double last = 0.0;
    bool dormant = start == State::dormant;
    while (auto ev = sys.next_event(rng, t)) {
      if (dormant) dormant_time += ev->time - last;
      last = ev->time;
      dormant = ev->kind == EventKind::to_dormant;
    }
    if (dormant) dormant_time += t - last;
    fraction[rep] = t > 0.0 ? dormant_time / t : (dormant ? 1.0 : 0.0);
  });
  return {summarize(fraction)};
}

}  // namespace onoff::bbm
