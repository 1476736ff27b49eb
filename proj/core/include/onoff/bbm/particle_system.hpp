#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "onoff/measure.hpp"
#include "onoff/params.hpp"
#include "onoff/random.hpp"

namespace onoff::bbm {

inline constexpr std::size_t kDefaultPopulationCap = 1'000'000;

enum class EventKind { branch_split, branch_death, to_dormant, to_active };

const char* to_string(EventKind kind);

struct EventRecord {
  double time = 0.0;
  EventKind kind = EventKind::to_active;
  std::uint64_t particle_id = 0;
  /// Index of the affected particle within its state class before the event.
  std::size_t index = 0;
};

struct ParticleInfo {
  State state = State::active;
  std::vector<double> position;
  /// Time at which `position` was last brought up to date.
  double clock = 0.0;
};

/// Exact event-driven simulator of critical binary on/off branching Brownian
/// motion with branching rate gamma/epsilon and particle mass epsilon.
///
/// Active and dormant particles live in two dense arrays with swap-remove
/// deletion. Active particles carry a clock and are only moved (by a Gaussian
/// increment of variance now - clock per coordinate) when they take part in
/// an event or when the system is synchronised; this has the same law as
/// moving every active particle at every event. Dormant positions are never
/// touched.
class ParticleSystem {
 public:
  ParticleSystem(const ModelParams& params, double epsilon,
                 std::size_t population_cap = kDefaultPopulationCap);
  /// Starts from `initial` at time 0, with epsilon = initial.particle_mass.
  ParticleSystem(const ModelParams& params, const Population& initial,
                 std::size_t population_cap = kDefaultPopulationCap);

  /// Inserts a particle at the current time and returns its id.
  std::uint64_t add(std::span<const double> position, State state);

  double time() const { return time_; }
  double epsilon() const { return epsilon_; }
  int dim() const { return params_.dim; }
  const ModelParams& params() const { return params_; }
  std::size_t population_cap() const { return cap_; }

  std::size_t n_active() const { return active_id_.size(); }
  std::size_t n_dormant() const { return dormant_id_.size(); }
  std::size_t size() const { return n_active() + n_dormant(); }
  bool empty() const { return size() == 0; }

  /// Per-particle branching rate gamma/epsilon.
  double branch_rate() const { return params_.gamma / epsilon_; }
  /// R = n_a (gamma/eps + c) + n_d c_tilde.
  double total_rate() const;

  /// Samples the next event. If it would fall after `horizon`, no event is
  /// applied, the clock is set to `horizon` and nullopt is returned (exact by
  /// memorylessness). An empty system is absorbing: nullopt, and the clock
  /// moves to `horizon` only if it is finite. Throws PopulationCapExceeded.
  std::optional<EventRecord> next_event(RandomSource& rng,
                                        double horizon = std::numeric_limits<double>::infinity());

  /// Moves every active particle to the current time.
  void sync(RandomSource& rng);

  /// Particle list as stored. Call `sync` first for a snapshot at `time()`.
  Population population() const;

  std::optional<ParticleInfo> find(std::uint64_t id) const;

 private:
  void catch_up(std::size_t active_index, RandomSource& rng);
  void remove_active(std::size_t k);
  void remove_dormant(std::size_t k);
  void push_active(std::span<const double> x, std::uint64_t id);
  void push_dormant(std::span<const double> x, std::uint64_t id);
  std::span<double> active_position(std::size_t k);
  std::span<double> dormant_position(std::size_t k);

  ModelParams params_;
  double epsilon_;
  std::size_t cap_;
  double time_ = 0.0;
  std::uint64_t next_id_ = 0;

  std::vector<double> active_pos_;
  std::vector<double> active_clock_;
  std::vector<std::uint64_t> active_id_;
  std::vector<double> dormant_pos_;
  std::vector<std::uint64_t> dormant_id_;
};

/// (epsilon * n_active, epsilon * n_dormant).
std::pair<double, double> total_masses(const ParticleSystem& system);

struct Snapshot {
  double time = 0.0;
  std::size_t n_active = 0;
  std::size_t n_dormant = 0;
  double active_mass = 0.0;
  double dormant_mass = 0.0;
  std::optional<Population> particles;
};

using Trajectory = std::vector<Snapshot>;

struct SimulateOptions {
  bool record_particles = false;
};

/// Runs the system exactly up to `t_end`, recording a snapshot at every
/// observation time (sorted, inside [system.time(), t_end]).
Trajectory simulate_until(ParticleSystem& system, double t_end, RandomSource& rng,
                          std::span<const double> observation_times,
                          const SimulateOptions& options = {});

}  // namespace onoff::bbm
