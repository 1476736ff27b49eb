#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "onoff/dual/pde.hpp"
#include "onoff/dual/picard.hpp"
#include "onoff/error.hpp"
#include "onoff/feller/feller.hpp"
#include "onoff/measure.hpp"
#include "onoff/params.hpp"
#include "onoff/test_function.hpp"

namespace onoff::cli {

/// Invalid configuration; `field()` is the dotted path of the offending key.
class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string field, const std::string& what)
      : Error("ConfigInvalid", field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Experiment {
  simulate_bbm,
  simulate_feller,
  solve_dual,
  verify_duality,
  eps_cascade,
  extinction_stats,
  decay_study,
  certificate,
};

const char* to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& id);
const std::vector<std::string>& experiment_ids();

struct BbmSettings {
  double epsilon = 0.2;
  double t = 1.0;
  std::vector<double> observation_times{0.5, 1.0};
  std::size_t population_cap = 1'000'000;
  bool record_particles = false;
  bool poisson_start = true;
  /// Observation steps over [0, t] for the martingale residual (0 disables it).
  std::size_t martingale_steps = 0;
};

struct FellerSettings {
  double T = 2.0;
  feller::SdeScheme scheme;
  std::vector<double> observation_times{0.5, 1.0, 1.5, 2.0};
  std::vector<std::pair<double, double>> thetas{{0.5, 0.3}, {1.0, 1.0}, {0.1, 2.0}};
  bool stop_on_hit = false;
  /// extinction-stats also requires the Wilson upper bound to be < 1.
  bool expect_survivors = false;
  double mgf_abs_tol = 0.01;
  /// Coarser steps rerun for the MGF weak-error report (the main dt completes the ladder).
  std::vector<double> dt_ladder{4e-3, 2e-3};
  /// Paths written to the per-path CSV.
  std::size_t dump_paths = 20;
};

struct PicardSettings {
  bool enabled = false;
  int n_intervals = 2;
  /// 0 uses the largest horizon admitted by the contraction condition.
  double T = 0.0;
  dual::PicardOptions options;
};

struct DualSettings {
  dual::DualVariant variant = dual::DualVariant::sbm;
  double T = 1.0;
  dual::PdeOptions pde;
  PicardSettings picard;
  double duality_rel_tol = 0.02;
};

struct CascadeSettings {
  double t = 1.0;
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  double gap_fraction = 0.05;
};

struct DecaySettings {
  std::vector<double> checkpoints{5.0, 10.0, 20.0, 50.0};
  double lambda = 0.01;
  std::vector<int> columns{1, 2};
  std::vector<double> w_checkpoints{0.0, 1.0, 2.0, 5.0, 10.0};
  std::size_t w_reps = 100'000;
};

struct CertificateSettings {
  std::vector<double> y_values{0.1, 0.25, 0.4, 0.5, 0.6, 0.8};
  double p0 = 0.05;
  double T = 5.0;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::simulate_feller;
  std::uint64_t seed = 0;
  std::size_t n_reps = 1000;
  unsigned workers = 1;
  std::string out = "results";
  ModelParams params{1.0, 1.0, 0.5, 1};
  FiniteMeasure initial_measure = FiniteMeasure::dirac({0.0}, State::active, 1.0);
  feller::FellerState initial_feller{1.0, 1.0};
  TestFunction test_function = TestFunction::gaussian(1.0, 1.0, {0.0}, 0.5);
  BbmSettings bbm;
  FellerSettings feller;
  DualSettings dual;
  CascadeSettings cascade;
  DecaySettings decay;
  CertificateSettings certificate;
};

/// Parses YAML text. Unknown keys, wrong types and values that violate a
/// module precondition raise ConfigInvalid naming the field.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Re-checks cross-field preconditions (e.g. after command-line overrides).
void validate(const ExperimentConfig& config);

}  // namespace onoff::cli
