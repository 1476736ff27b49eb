#include "onoff/feller/feller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "onoff/error.hpp"
#include "onoff/parallel.hpp"

namespace onoff::feller {

const char* to_string(NoiseVariant v) {
  return v == NoiseVariant::generator_consistent ? "generator-consistent" : "literal";
}

double noise_coefficient(double p, const ModelParams& params, NoiseVariant variant) {
  const double pp = std::max(p, 0.0);
  return variant == NoiseVariant::generator_consistent ? std::sqrt(params.gamma * pp)
                                                       : 0.5 * params.gamma * std::sqrt(pp);
}

namespace {

/// Coefficients of the exact q update q' = q * decay + p * gain.
struct QStep {
  double decay;
  double gain;
};

QStep q_step(const ModelParams& params, double dt) {
  if (params.c_tilde > 0.0) {
    const double decay = std::exp(-params.c_tilde * dt);
    return {decay, params.c * (-std::expm1(-params.c_tilde * dt)) / params.c_tilde};
  }
  return {1.0, params.c * dt};
}

StepResult step_with(const FellerState& s, const ModelParams& params, const SdeScheme& scheme,
                     const QStep& qs, double sqrt_dt, double gaussian) {
  const double drift = params.c_tilde * s.q - params.c * s.p;
  const double proposal =
      s.p + drift * scheme.dt + noise_coefficient(s.p, params, scheme.variant) * sqrt_dt * gaussian;
  return {{std::max(proposal, 0.0), s.q * qs.decay + s.p * qs.gain}, proposal};
}

void check_scheme(const SdeScheme& scheme) {
  if (!(scheme.dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (!(scheme.p_floor >= 0.0)) throw InvalidArgument("p_floor must be >= 0");
}

void check_state(const FellerState& s) {
  if (!(s.p >= 0.0) || !(s.q >= 0.0)) throw InvalidArgument("Feller state must be nonnegative");
}

std::size_t steps_for(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

}  // namespace

StepResult feller_step(const FellerState& state, const ModelParams& params,
                       const SdeScheme& scheme, double gaussian) {
  check_scheme(scheme);
  return step_with(state, params, scheme, q_step(params, scheme.dt), std::sqrt(scheme.dt),
                   gaussian);
}

StepResult feller_step(const FellerState& state, const ModelParams& params,
                       const SdeScheme& scheme, RandomSource& rng) {
  return feller_step(state, params, scheme, rng.normal());
}

std::span<const double> FellerEnsemble::p_at(std::size_t j) const {
  return {p.data() + j * n_paths, n_paths};
}

std::span<const double> FellerEnsemble::q_at(std::size_t j) const {
  return {q.data() + j * n_paths, n_paths};
}

std::vector<double> FellerEnsemble::r_at(std::size_t j) const {
  std::vector<double> r(n_paths);
  for (std::size_t k = 0; k < n_paths; ++k) r[k] = p[j * n_paths + k] + q[j * n_paths + k];
  return r;
}

FellerEnsemble simulate_feller_ensemble(const ModelParams& params, const FellerState& initial,
                                        const SdeScheme& scheme, double T, std::size_t n_paths,
                                        const EnsembleOptions& options) {
  check_scheme(scheme);
  check_state(initial);
  if (!(T > 0.0)) throw InvalidArgument("T must be > 0");
  if (n_paths < 1) throw InvalidArgument("n_paths must be >= 1");

  const std::size_t n_steps = steps_for(T, scheme.dt);
  std::vector<std::size_t> obs_steps;
  for (double t : options.observation_times) {
    if (!(t >= 0.0) || t > T + 0.5 * scheme.dt) {
      throw InvalidArgument("observation time outside [0, T]");
    }
    const std::size_t k = steps_for(t, scheme.dt);
    if (!obs_steps.empty() && k < obs_steps.back()) {
      throw InvalidArgument("observation times must be sorted");
    }
    obs_steps.push_back(k);
  }

  FellerEnsemble ens;
  ens.params = params;
  ens.scheme = scheme;
  ens.initial = initial;
  ens.horizon = static_cast<double>(n_steps) * scheme.dt;
  ens.n_paths = n_paths;
  for (std::size_t k : obs_steps) ens.times.push_back(static_cast<double>(k) * scheme.dt);
  ens.p.assign(obs_steps.size() * n_paths, 0.0);
  ens.q.assign(obs_steps.size() * n_paths, 0.0);
  ens.paths.resize(n_paths);

  const QStep qs = q_step(params, scheme.dt);
  const double sqrt_dt = std::sqrt(scheme.dt);

  parallel_for(n_paths, options.workers, [&](std::size_t path) {
    RandomSource rng(options.master_seed, options.first_stream + path);
    FellerState s = initial;
    PathSummary sum;
    sum.min_proposal = std::numeric_limits<double>::infinity();
    sum.min_p = s.p;
    sum.min_q = s.q;
    sum.min_r = s.r();
    sum.min_seed_margin = 0.0;
    sum.seed_margin_time = 0.0;
    if (s.p <= scheme.p_floor) {
      sum.hit = true;
      sum.hit_time = 0.0;
    }
    double bound = initial.q;
    std::size_t next_obs = 0;
    auto record = [&](std::size_t step) {
      while (next_obs < obs_steps.size() && obs_steps[next_obs] == step) {
        ens.p[next_obs * n_paths + path] = s.p;
        ens.q[next_obs * n_paths + path] = s.q;
        ++next_obs;
      }
    };
    record(0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
      if (options.stop_on_hit && sum.hit) break;
      const StepResult res = step_with(s, params, scheme, qs, sqrt_dt, rng.normal());
      s = res.state;
      bound *= qs.decay;
      const double t = static_cast<double>(k) * scheme.dt;
      sum.min_proposal = std::min(sum.min_proposal, res.proposal);
      sum.min_p = std::min(sum.min_p, s.p);
      sum.min_q = std::min(sum.min_q, s.q);
      sum.min_r = std::min(sum.min_r, s.r());
      if (s.q - bound < sum.min_seed_margin) {
        sum.min_seed_margin = s.q - bound;
        sum.seed_margin_time = t;
      }
      if (!sum.hit && (res.proposal <= 0.0 || s.p <= scheme.p_floor)) {
        sum.hit = true;
        sum.hit_time = t;
      }
      record(k);
    }
    // A stopped path keeps its last value at the remaining recording times.
    while (next_obs < obs_steps.size()) {
      ens.p[next_obs * n_paths + path] = s.p;
      ens.q[next_obs * n_paths + path] = s.q;
      ++next_obs;
    }
    sum.final_state = s;
    ens.paths[path] = sum;
  });
  return ens;
}

SampleSummary mgf(const FellerEnsemble& ensemble, std::size_t time_index, double theta1,
                  double theta2) {
  if (time_index >= ensemble.times.size()) throw InvalidArgument("time index out of range");
  const auto p = ensemble.p_at(time_index);
  const auto q = ensemble.q_at(time_index);
  std::vector<double> v(ensemble.n_paths);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(-theta1 * p[k] - theta2 * q[k]);
  return summarize(v);
}

HitStats hit_zero_stats(const FellerEnsemble& ensemble, double p_floor) {
  if (ensemble.paths.empty()) throw InvalidArgument("hit_zero_stats needs a non-empty ensemble");
  HitStats h;
  h.n = ensemble.paths.size();
  for (const PathSummary& s : ensemble.paths) {
    if (s.min_proposal <= 0.0 || s.min_p <= p_floor) ++h.hits;
  }
  h.fraction = static_cast<double>(h.hits) / static_cast<double>(h.n);
  h.wilson = wilson_interval(h.hits, h.n);
  return h;
}

FellerPath simulate_feller_path(const ModelParams& params, const FellerState& initial,
                                const SdeScheme& scheme, double T, RandomSource& rng) {
  check_scheme(scheme);
  check_state(initial);
  const std::size_t n_steps = steps_for(T, scheme.dt);
  const QStep qs = q_step(params, scheme.dt);
  const double sqrt_dt = std::sqrt(scheme.dt);
  FellerPath path;
  path.times.reserve(n_steps + 1);
  path.states.reserve(n_steps + 1);
  FellerState s = initial;
  path.times.push_back(0.0);
  path.states.push_back(s);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    s = step_with(s, params, scheme, qs, sqrt_dt, rng.normal()).state;
    path.times.push_back(static_cast<double>(k) * scheme.dt);
    path.states.push_back(s);
  }
  return path;
}

PersistenceResult persistence_check(const FellerPath& path, const ModelParams& params,
                                    double tol) {
  if (path.states.empty() || !(path.states.front().q > 0.0)) {
    throw InvalidArgument("persistence_check requires q_0 > 0");
  }
  const double q0 = path.states.front().q;
  PersistenceResult res;
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    const FellerState& s = path.states[k];
    const double margin = s.q - q0 * std::exp(-params.c_tilde * path.times[k]);
    res.min_margin = std::min(res.min_margin, margin);
    if (res.pass && (margin < -tol || !(s.r() > 0.0))) {
      res.pass = false;
      res.violation_time = path.times[k];
    }
  }
  return res;
}

PersistenceSummary persistence_summary(const FellerEnsemble& ensemble, double tol) {
  if (!(ensemble.initial.q > 0.0)) {
    throw InvalidArgument("persistence_summary requires q_0 > 0");
  }
  PersistenceSummary out;
  out.n_paths = ensemble.paths.size();
  for (const PathSummary& s : ensemble.paths) {
    if (s.min_seed_margin < -tol) ++out.bound_violations;
    if (!(s.min_r > 0.0)) ++out.zero_r_paths;
    out.worst_margin = std::min(out.worst_margin, s.min_seed_margin);
  }
  return out;
}

}  // namespace onoff::feller
