#include "onoff/bbm/particle_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "onoff/error.hpp"

namespace onoff::bbm {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::branch_split:
      return "branch_split";
    case EventKind::branch_death:
      return "branch_death";
    case EventKind::to_dormant:
      return "to_dormant";
    case EventKind::to_active:
      return "to_active";
  }
  return "unknown";
}

namespace {

void check_rates(const ModelParams& p) {
  if (!(p.gamma >= 0.0) || !(p.c >= 0.0) || !(p.c_tilde >= 0.0)) {
    throw NonPositiveRate("rates must be nonnegative");
  }
  if (p.dim < 1) throw BadDimension("dim must be >= 1");
}

}  // namespace

ParticleSystem::ParticleSystem(const ModelParams& params, double epsilon,
                               std::size_t population_cap)
    : params_(params), epsilon_(epsilon), cap_(population_cap) {
  check_rates(params_);
  if (!(epsilon > 0.0)) throw NonPositiveEpsilon("epsilon must be > 0");
}

ParticleSystem::ParticleSystem(const ModelParams& params, const Population& initial,
                               std::size_t population_cap)
    : ParticleSystem(params, initial.particle_mass, population_cap) {
  if (initial.dim != params.dim) {
    throw BadDimension("population dimension " + std::to_string(initial.dim) +
                       " != model dimension " + std::to_string(params.dim));
  }
  if (initial.size() > cap_) {
    throw PopulationCapExceeded("initial population exceeds cap " + std::to_string(cap_));
  }
  for (std::size_t k = 0; k < initial.size(); ++k) add(initial.position(k), initial.states[k]);
}

std::uint64_t ParticleSystem::add(std::span<const double> position, State state) {
  if (position.size() != static_cast<std::size_t>(params_.dim)) {
    throw BadDimension("particle position has wrong dimension");
  }
  if (size() >= cap_) {
    throw PopulationCapExceeded("population cap " + std::to_string(cap_) + " reached");
  }
  const std::uint64_t id = next_id_++;
  if (state == State::active) {
    push_active(position, id);
  } else {
    push_dormant(position, id);
  }
  return id;
}

double ParticleSystem::total_rate() const {
  return static_cast<double>(n_active()) * (branch_rate() + params_.c) +
         static_cast<double>(n_dormant()) * params_.c_tilde;
}

std::span<double> ParticleSystem::active_position(std::size_t k) {
  const auto d = static_cast<std::size_t>(params_.dim);
  return {active_pos_.data() + k * d, d};
}

std::span<double> ParticleSystem::dormant_position(std::size_t k) {
  const auto d = static_cast<std::size_t>(params_.dim);
  return {dormant_pos_.data() + k * d, d};
}

void ParticleSystem::push_active(std::span<const double> x, std::uint64_t id) {
  active_pos_.insert(active_pos_.end(), x.begin(), x.end());
  active_clock_.push_back(time_);
  active_id_.push_back(id);
}

void ParticleSystem::push_dormant(std::span<const double> x, std::uint64_t id) {
  dormant_pos_.insert(dormant_pos_.end(), x.begin(), x.end());
  dormant_id_.push_back(id);
}

void ParticleSystem::remove_active(std::size_t k) {
  const auto d = static_cast<std::size_t>(params_.dim);
  const std::size_t last = n_active() - 1;
  if (k != last) {
    std::copy_n(active_pos_.begin() + static_cast<std::ptrdiff_t>(last * d), d,
                active_pos_.begin() + static_cast<std::ptrdiff_t>(k * d));
    active_clock_[k] = active_clock_[last];
    active_id_[k] = active_id_[last];
  }
  active_pos_.resize(last * d);
  active_clock_.pop_back();
  active_id_.pop_back();
}

void ParticleSystem::remove_dormant(std::size_t k) {
  const auto d = static_cast<std::size_t>(params_.dim);
  const std::size_t last = n_dormant() - 1;
  if (k != last) {
    std::copy_n(dormant_pos_.begin() + static_cast<std::ptrdiff_t>(last * d), d,
                dormant_pos_.begin() + static_cast<std::ptrdiff_t>(k * d));
    dormant_id_[k] = dormant_id_[last];
  }
  dormant_pos_.resize(last * d);
  dormant_id_.pop_back();
}

void ParticleSystem::catch_up(std::size_t k, RandomSource& rng) {
  const double elapsed = time_ - active_clock_[k];
  if (elapsed > 0.0) {
    const double s = std::sqrt(elapsed);
    for (double& xi : active_position(k)) xi += s * rng.normal();
  }
  active_clock_[k] = time_;
}

void ParticleSystem::sync(RandomSource& rng) {
  for (std::size_t k = 0; k < n_active(); ++k) catch_up(k, rng);
}

std::optional<EventRecord> ParticleSystem::next_event(RandomSource& rng, double horizon) {
  if (horizon < time_) throw InvalidArgument("horizon lies in the past");
  const double rate = total_rate();
  if (!(rate > 0.0)) {
    if (std::isfinite(horizon)) time_ = horizon;
    return std::nullopt;
  }
  const double t_next = time_ + rng.exponential(rate);
  if (t_next > horizon) {
    time_ = horizon;
    return std::nullopt;
  }
  time_ = t_next;

  const double per_active = branch_rate() + params_.c;
  const double active_rate = static_cast<double>(n_active()) * per_active;
  const bool pick_active =
      n_dormant() == 0 || (n_active() > 0 && rng.uniform() * rate < active_rate);

  EventRecord ev;
  ev.time = time_;
  if (pick_active) {
    const std::size_t k = rng.index(n_active());
    catch_up(k, rng);
    ev.index = k;
    ev.particle_id = active_id_[k];
    if (rng.uniform() * per_active < params_.c) {
      ev.kind = EventKind::to_dormant;
      push_dormant(active_position(k), active_id_[k]);
      remove_active(k);
    } else if (rng.uniform() < 0.5) {
      ev.kind = EventKind::branch_death;
      remove_active(k);
    } else {
      ev.kind = EventKind::branch_split;
      if (size() >= cap_) {
        throw PopulationCapExceeded("population cap " + std::to_string(cap_) +
                                    " exceeded at t=" + std::to_string(time_));
      }
      // Copy first: push_active may reallocate the storage behind the span.
      const std::vector<double> x(active_position(k).begin(), active_position(k).end());
      push_active(x, next_id_++);
    }
  } else {
    const std::size_t k = rng.index(n_dormant());
    ev.kind = EventKind::to_active;
    ev.index = k;
    ev.particle_id = dormant_id_[k];
    push_active(dormant_position(k), dormant_id_[k]);
    remove_dormant(k);
  }
  return ev;
}

Population ParticleSystem::population() const {
  Population pop;
  pop.dim = params_.dim;
  pop.particle_mass = epsilon_;
  const auto d = static_cast<std::size_t>(params_.dim);
  pop.positions.reserve(size() * d);
  pop.states.reserve(size());
  for (std::size_t k = 0; k < n_active(); ++k) {
    pop.push_back(std::span<const double>(active_pos_.data() + k * d, d), State::active);
  }
  for (std::size_t k = 0; k < n_dormant(); ++k) {
    pop.push_back(std::span<const double>(dormant_pos_.data() + k * d, d), State::dormant);
  }
  return pop;
}

std::optional<ParticleInfo> ParticleSystem::find(std::uint64_t id) const {
  const auto d = static_cast<std::size_t>(params_.dim);
  for (std::size_t k = 0; k < n_active(); ++k) {
    if (active_id_[k] == id) {
      const auto* p = active_pos_.data() + k * d;
      return ParticleInfo{State::active, std::vector<double>(p, p + d), active_clock_[k]};
    }
  }
  for (std::size_t k = 0; k < n_dormant(); ++k) {
    if (dormant_id_[k] == id) {
      const auto* p = dormant_pos_.data() + k * d;
      return ParticleInfo{State::dormant, std::vector<double>(p, p + d), time_};
    }
  }
  return std::nullopt;
}

std::pair<double, double> total_masses(const ParticleSystem& system) {
  return {system.epsilon() * static_cast<double>(system.n_active()),
          system.epsilon() * static_cast<double>(system.n_dormant())};
}

Trajectory simulate_until(ParticleSystem& system, double t_end, RandomSource& rng,
                          std::span<const double> observation_times,
                          const SimulateOptions& options) {
  if (!(t_end >= system.time())) throw InvalidArgument("t_end lies before the current time");
  double prev = system.time();
  for (double t : observation_times) {
    if (!(t >= prev) || t > t_end) {
      throw InvalidArgument("observation times must be sorted and inside [now, t_end]");
    }
    prev = t;
  }

  Trajectory out;
  out.reserve(observation_times.size());
  auto run_to = [&](double target) {
    while (system.next_event(rng, target)) {
    }
  };
  for (double t : observation_times) {
    run_to(t);
    Snapshot snap;
    snap.time = t;
    snap.n_active = system.n_active();
    snap.n_dormant = system.n_dormant();
    std::tie(snap.active_mass, snap.dormant_mass) = total_masses(system);
    if (options.record_particles) {
      system.sync(rng);
      snap.particles = system.population();
    }
    out.push_back(std::move(snap));
  }
  run_to(t_end);
  return out;
}

}  // namespace onoff::bbm
