#include "onoff/bbm/martingale.hpp"

#include "onoff/error.hpp"
#include "onoff/parallel.hpp"

namespace onoff::bbm {

double generator_action(const TestFunction& phi, const Laplacian& phi_laplacian,
                        const ModelParams& params, std::span<const double> x, State s) {
  const double on = phi(x, State::active);
  const double off = phi(x, State::dormant);
  if (s == State::active) {
    return 0.5 * phi_laplacian(x, State::active) + params.c * (off - on);
  }
  return params.c_tilde * (on - off);
}

MartingaleSeries martingale_residual(const Trajectory& trajectory, const TestFunction& phi,
                                     const Laplacian& phi_laplacian, const ModelParams& params) {
  MartingaleSeries out;
  if (trajectory.empty()) return out;
  const std::size_t n = trajectory.size();
  std::vector<double> pair(n), drift(n), sq(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!trajectory[k].particles) {
      throw InvalidArgument("martingale_residual needs snapshots with particle dumps");
    }
    const Population& pop = *trajectory[k].particles;
    double a = 0.0, b = 0.0, q = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const auto x = pop.position(i);
      const State s = pop.states[i];
      const double v = phi(x, s);
      a += v;
      b += generator_action(phi, phi_laplacian, params, x, s);
      if (s == State::active) q += v * v;
    }
    pair[k] = pop.particle_mass * a;
    drift[k] = pop.particle_mass * b;
    sq[k] = pop.particle_mass * q;
  }
  out.times.resize(n);
  out.residual.resize(n);
  out.qv_predictor.resize(n);
  double int_drift = 0.0, int_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double h = trajectory[k].time - trajectory[k - 1].time;
      int_drift += 0.5 * h * (drift[k] + drift[k - 1]);
      int_sq += 0.5 * h * (sq[k] + sq[k - 1]);
    }
    out.times[k] = trajectory[k].time;
    out.residual[k] = pair[k] - pair[0] - int_drift;
    out.qv_predictor[k] = params.gamma * int_sq;
  }
  return out;
}

MartingaleSeries martingale_residual(const Trajectory& trajectory, const TestFunction& phi,
                                     const ModelParams& params) {
  if (!phi.has_laplacian()) {
    throw MissingDerivative("test function " + phi.describe() + " has no Laplacian");
  }
  return martingale_residual(
      trajectory, phi,
      [&phi](std::span<const double> x, State s) { return phi.laplacian(x, s); }, params);
}

MartingaleReport martingale_ensemble(const FiniteMeasure& mu, const TestFunction& phi,
                                     double epsilon, double t, std::size_t n_obs,
                                     std::size_t n_reps, const ModelParams& params,
                                     const McOptions& options) {
  if (n_reps < 2) throw InvalidArgument("martingale_ensemble needs n_reps >= 2");
  if (n_obs < 1 || !(t > 0.0)) throw InvalidArgument("martingale_ensemble needs t > 0, n_obs >= 1");
  if (!phi.has_laplacian()) {
    throw MissingDerivative("test function " + phi.describe() + " has no Laplacian");
  }
  std::vector<double> times(n_obs + 1);
  for (std::size_t k = 0; k <= n_obs; ++k) {
    times[k] = t * static_cast<double>(k) / static_cast<double>(n_obs);
  }
  std::vector<double> residual(n_reps), qv(n_reps);
  parallel_for(n_reps, options.workers, [&](std::size_t rep) {
    RandomSource rng(options.master_seed, options.first_stream + rep);
    ParticleSystem sys(params, initial_population(mu, epsilon, rng, options.poisson_start),
                       options.population_cap);
    const Trajectory traj = simulate_until(sys, t, rng, times, {.record_particles = true});
    const MartingaleSeries series = martingale_residual(traj, phi, params);
    residual[rep] = series.residual.back();
    qv[rep] = series.qv_predictor.back();
  });
  return {t, n_obs, summarize(residual), summarize(qv)};
}

}  // namespace onoff::bbm
