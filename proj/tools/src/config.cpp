#include "onoff/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace onoff::cli {

namespace {

struct ExperimentName {
  Experiment id;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::simulate_bbm, "simulate-bbm"},
    {Experiment::simulate_feller, "simulate-feller"},
    {Experiment::solve_dual, "solve-dual"},
    {Experiment::verify_duality, "verify-duality"},
    {Experiment::eps_cascade, "eps-cascade"},
    {Experiment::extinction_stats, "extinction-stats"},
    {Experiment::decay_study, "decay-study"},
    {Experiment::certificate, "certificate"},
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// YAML mapping with a dotted path for error messages and a key whitelist.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::initializer_list<const char*> allowed)
      : node_(std::move(node)), path_(std::move(path)) {
    if (!node_ || node_.IsNull()) return;
    if (!node_.IsMap()) throw ConfigInvalid(path_.empty() ? "<root>" : path_, "expected a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) throw ConfigInvalid(join(path_, key), "unknown key");
    }
  }

  bool has(const char* key) const { return node_ && node_.IsMap() && node_[key]; }
  YAML::Node raw(const char* key) const { return has(key) ? node_[key] : YAML::Node(); }
  std::string path(const char* key) const { return join(path_, key); }

  template <typename T>
  void read(const char* key, T& target) const {
    if (!has(key)) return;
    target = convert<T>(node_[key], path(key));
  }

  template <typename T>
  static T convert(const YAML::Node& n, const std::string& path) {
    try {
      if (!n.IsScalar()) throw YAML::Exception(YAML::Mark::null_mark(), "not a scalar");
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigInvalid(path, std::string("expected a ") + type_name<T>());
    }
  }

  template <typename T>
  static std::vector<T> list(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) throw ConfigInvalid(path, "expected a list");
    std::vector<T> out;
    for (std::size_t k = 0; k < n.size(); ++k) {
      out.push_back(convert<T>(n[k], path + "[" + std::to_string(k) + "]"));
    }
    return out;
  }

 private:
  template <typename T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) {
      return "boolean";
    } else if constexpr (std::is_integral_v<T>) {
      return "nonnegative integer";
    } else if constexpr (std::is_floating_point_v<T>) {
      return "number";
    } else {
      return "string";
    }
  }

  YAML::Node node_;
  std::string path_;
};

State parse_state(const YAML::Node& n, const std::string& path) {
  const auto s = Section::convert<std::string>(n, path);
  if (s == "active" || s == "1") return State::active;
  if (s == "dormant" || s == "0") return State::dormant;
  throw ConfigInvalid(path, "state must be active/1 or dormant/0");
}

TestFunction parse_test_function(const Section& s) {
  std::string kind = "gaussian";
  double active = 1.0, dormant = 1.0, width = 0.5;
  s.read("kind", kind);
  s.read("active", active);
  s.read("dormant", dormant);
  s.read("width", width);
  std::vector<double> center{0.0};
  if (s.has("center")) center = Section::list<double>(s.raw("center"), s.path("center"));
  if (!(active >= 0.0)) throw ConfigInvalid(s.path("active"), "must be >= 0");
  if (!(dormant >= 0.0)) throw ConfigInvalid(s.path("dormant"), "must be >= 0");
  if (kind == "constant") return TestFunction::constant(active, dormant);
  if (!(width > 0.0)) throw ConfigInvalid(s.path("width"), "must be > 0");
  if (kind == "gaussian") return TestFunction::gaussian(active, dormant, center, width);
  if (kind == "tent") return TestFunction::tent(active, dormant, center, width);
  if (kind == "ball") return TestFunction::ball(active, dormant, center, width);
  throw ConfigInvalid(s.path("kind"), "unknown test function kind '" + kind + "'");
}

std::vector<double> read_times(const Section& s, const char* key, std::vector<double> fallback) {
  if (!s.has(key)) return fallback;
  return Section::list<double>(s.raw(key), s.path(key));
}

void check_sorted_within(const std::vector<double>& v, double lo, double hi,
                         const std::string& path) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] >= lo) || v[k] > hi || (k > 0 && v[k] < v[k - 1])) {
      throw ConfigInvalid(path, "times must be sorted and inside [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    }
  }
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& x : kExperiments) {
    if (x.id == e) return x.name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& id) {
  for (const auto& x : kExperiments) {
    if (id == x.name) return x.id;
  }
  return std::nullopt;
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& x : kExperiments) v.emplace_back(x.name);
    return v;
  }();
  return ids;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigInvalid("<root>", std::string("YAML parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  const Section top(root, "",
                    {"experiment", "seed", "n_reps", "workers", "out", "params", "initial",
                     "test_function", "bbm", "feller", "dual", "cascade", "decay", "certificate"});
  if (!top.has("experiment")) throw ConfigInvalid("experiment", "missing experiment id");
  const auto id = Section::convert<std::string>(top.raw("experiment"), "experiment");
  const auto exp = parse_experiment(id);
  if (!exp) throw ConfigInvalid("experiment", "unknown experiment id '" + id + "'");
  cfg.experiment = *exp;
  top.read("seed", cfg.seed);
  top.read("n_reps", cfg.n_reps);
  top.read("workers", cfg.workers);
  top.read("out", cfg.out);

  {
    const Section s(top.raw("params"), "params", {"gamma", "c", "c_tilde", "dim"});
    s.read("gamma", cfg.params.gamma);
    s.read("c", cfg.params.c);
    s.read("c_tilde", cfg.params.c_tilde);
    s.read("dim", cfg.params.dim);
  }
  {
    const Section s(top.raw("initial"), "initial", {"atoms", "feller"});
    if (s.has("atoms")) {
      const YAML::Node atoms = s.raw("atoms");
      if (!atoms.IsSequence()) throw ConfigInvalid("initial.atoms", "expected a list");
      FiniteMeasure mu(cfg.params.dim);
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const std::string path = "initial.atoms[" + std::to_string(k) + "]";
        const Section a(atoms[k], path, {"position", "state", "weight"});
        std::vector<double> pos(static_cast<std::size_t>(std::max(cfg.params.dim, 1)), 0.0);
        if (a.has("position")) pos = Section::list<double>(a.raw("position"), a.path("position"));
        const State st = a.has("state") ? parse_state(a.raw("state"), a.path("state"))
                                        : State::active;
        double w = 1.0;
        a.read("weight", w);
        if (!(w > 0.0)) throw ConfigInvalid(a.path("weight"), "must be > 0");
        if (pos.size() != static_cast<std::size_t>(cfg.params.dim)) {
          throw ConfigInvalid(a.path("position"), "length must equal params.dim");
        }
        mu.add(pos, st, w);
      }
      cfg.initial_measure = mu;
    } else if (cfg.params.dim != 1) {
      cfg.initial_measure = FiniteMeasure::dirac(
          std::vector<double>(static_cast<std::size_t>(std::max(cfg.params.dim, 1)), 0.0),
          State::active, 1.0);
    }
    const Section f(s.raw("feller"), "initial.feller", {"p", "q"});
    f.read("p", cfg.initial_feller.p);
    f.read("q", cfg.initial_feller.q);
  }
  if (top.has("test_function")) {
    cfg.test_function = parse_test_function(
        Section(top.raw("test_function"), "test_function",
                {"kind", "active", "dormant", "center", "width"}));
  }
  {
    const Section s(top.raw("bbm"), "bbm",
                    {"epsilon", "t", "observation_times", "population_cap", "record_particles",
                     "poisson_start", "martingale_steps"});
    s.read("epsilon", cfg.bbm.epsilon);
    s.read("t", cfg.bbm.t);
    cfg.bbm.observation_times = read_times(s, "observation_times", cfg.bbm.observation_times);
    s.read("population_cap", cfg.bbm.population_cap);
    s.read("record_particles", cfg.bbm.record_particles);
    s.read("poisson_start", cfg.bbm.poisson_start);
    s.read("martingale_steps", cfg.bbm.martingale_steps);
  }
  {
    const Section s(top.raw("feller"), "feller",
                    {"T", "dt", "variant", "p_floor", "observation_times", "thetas",
                     "stop_on_hit", "expect_survivors", "mgf_abs_tol", "dump_paths", "dt_ladder"});
    s.read("T", cfg.feller.T);
    s.read("dt", cfg.feller.scheme.dt);
    s.read("p_floor", cfg.feller.scheme.p_floor);
    if (s.has("variant")) {
      const auto v = Section::convert<std::string>(s.raw("variant"), s.path("variant"));
      if (v == "generator-consistent") {
        cfg.feller.scheme.variant = feller::NoiseVariant::generator_consistent;
      } else if (v == "literal") {
        cfg.feller.scheme.variant = feller::NoiseVariant::literal;
      } else {
        throw ConfigInvalid(s.path("variant"), "expected generator-consistent or literal");
      }
    }
    cfg.feller.observation_times = read_times(s, "observation_times", cfg.feller.observation_times);
    if (s.has("thetas")) {
      const YAML::Node th = s.raw("thetas");
      if (!th.IsSequence()) throw ConfigInvalid(s.path("thetas"), "expected a list of pairs");
      cfg.feller.thetas.clear();
      for (std::size_t k = 0; k < th.size(); ++k) {
        const std::string path = s.path("thetas") + "[" + std::to_string(k) + "]";
        const auto pair = Section::list<double>(th[k], path);
        if (pair.size() != 2) throw ConfigInvalid(path, "expected [theta1, theta2]");
        if (!(pair[0] >= 0.0) || !(pair[1] >= 0.0)) throw ConfigInvalid(path, "must be >= 0");
        cfg.feller.thetas.emplace_back(pair[0], pair[1]);
      }
    }
    s.read("stop_on_hit", cfg.feller.stop_on_hit);
    s.read("expect_survivors", cfg.feller.expect_survivors);
    s.read("mgf_abs_tol", cfg.feller.mgf_abs_tol);
    s.read("dump_paths", cfg.feller.dump_paths);
    if (s.has("dt_ladder")) {
      cfg.feller.dt_ladder = Section::list<double>(s.raw("dt_ladder"), s.path("dt_ladder"));
    }
  }
  {
    const Section s(top.raw("dual"), "dual",
                    {"variant", "T", "dx", "dt", "cfl", "epsilon", "bbm_reaction", "richardson",
                     "margin_factor", "duality_rel_tol", "picard"});
    if (s.has("variant")) {
      const auto v = Section::convert<std::string>(s.raw("variant"), s.path("variant"));
      if (v == "sbm") {
        cfg.dual.variant = dual::DualVariant::sbm;
      } else if (v == "eps") {
        cfg.dual.variant = dual::DualVariant::eps;
      } else if (v == "bbm") {
        cfg.dual.variant = dual::DualVariant::bbm;
      } else {
        throw ConfigInvalid(s.path("variant"), "expected sbm, eps or bbm");
      }
    }
    s.read("T", cfg.dual.T);
    s.read("dx", cfg.dual.pde.dx);
    s.read("dt", cfg.dual.pde.dt);
    s.read("cfl", cfg.dual.pde.cfl);
    s.read("epsilon", cfg.dual.pde.epsilon);
    s.read("richardson", cfg.dual.pde.richardson);
    s.read("margin_factor", cfg.dual.pde.margin_factor);
    s.read("duality_rel_tol", cfg.dual.duality_rel_tol);
    if (s.has("bbm_reaction")) {
      const auto v = Section::convert<std::string>(s.raw("bbm_reaction"), s.path("bbm_reaction"));
      if (v == "particle-consistent") {
        cfg.dual.pde.bbm_reaction = dual::BbmReaction::particle_consistent;
      } else if (v == "half-rate") {
        cfg.dual.pde.bbm_reaction = dual::BbmReaction::half_rate;
      } else {
        throw ConfigInvalid(s.path("bbm_reaction"), "expected particle-consistent or half-rate");
      }
    }
    if (s.has("picard")) {
      const Section p(s.raw("picard"), "dual.picard",
                      {"enabled", "n_intervals", "T", "inner", "substeps", "tol",
                       "max_iterations", "fk_paths"});
      cfg.dual.picard.enabled = true;
      p.read("enabled", cfg.dual.picard.enabled);
      p.read("n_intervals", cfg.dual.picard.n_intervals);
      p.read("T", cfg.dual.picard.T);
      p.read("substeps", cfg.dual.picard.options.substeps);
      p.read("tol", cfg.dual.picard.options.tol);
      p.read("max_iterations", cfg.dual.picard.options.max_iterations);
      p.read("fk_paths", cfg.dual.picard.options.fk_paths);
      if (p.has("inner")) {
        const auto v = Section::convert<std::string>(p.raw("inner"), p.path("inner"));
        if (v == "pde") {
          cfg.dual.picard.options.inner = dual::InnerExpectation::pde;
        } else if (v == "feynman-kac-mc") {
          cfg.dual.picard.options.inner = dual::InnerExpectation::feynman_kac;
        } else {
          throw ConfigInvalid(p.path("inner"), "expected pde or feynman-kac-mc");
        }
      }
    }
  }
  {
    const Section s(top.raw("cascade"), "cascade", {"t", "eps_list", "gap_fraction"});
    s.read("t", cfg.cascade.t);
    cfg.cascade.eps_list = read_times(s, "eps_list", cfg.cascade.eps_list);
    s.read("gap_fraction", cfg.cascade.gap_fraction);
  }
  {
    const Section s(top.raw("decay"), "decay",
                    {"checkpoints", "lambda", "columns", "w_checkpoints", "w_reps"});
    cfg.decay.checkpoints = read_times(s, "checkpoints", cfg.decay.checkpoints);
    s.read("lambda", cfg.decay.lambda);
    if (s.has("columns")) cfg.decay.columns = Section::list<int>(s.raw("columns"), s.path("columns"));
    cfg.decay.w_checkpoints = read_times(s, "w_checkpoints", cfg.decay.w_checkpoints);
    s.read("w_reps", cfg.decay.w_reps);
  }
  {
    const Section s(top.raw("certificate"), "certificate", {"y_values", "p0", "T"});
    cfg.certificate.y_values = read_times(s, "y_values", cfg.certificate.y_values);
    s.read("p0", cfg.certificate.p0);
    s.read("T", cfg.certificate.T);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  const ModelParams& p = c.params;
  if (!(p.gamma > 0.0)) throw ConfigInvalid("params.gamma", "NonPositiveRate: must be > 0");
  if (!(p.c > 0.0)) throw ConfigInvalid("params.c", "NonPositiveRate: must be > 0");
  if (!(p.c_tilde > 0.0)) throw ConfigInvalid("params.c_tilde", "NonPositiveRate: must be > 0");
  if (p.dim < 1) throw ConfigInvalid("params.dim", "BadDimension: must be >= 1");
  if (c.n_reps < 1) throw ConfigInvalid("n_reps", "empty ensemble: must be >= 1");
  if (c.initial_measure.dim() != p.dim) {
    throw ConfigInvalid("initial.atoms", "dimension differs from params.dim");
  }
  if (!(c.initial_feller.p >= 0.0)) throw ConfigInvalid("initial.feller.p", "must be >= 0");
  if (!(c.initial_feller.q >= 0.0)) throw ConfigInvalid("initial.feller.q", "must be >= 0");
  const auto& center = c.test_function.center();
  if (!c.test_function.is_spatially_constant() &&
      center.size() != static_cast<std::size_t>(p.dim)) {
    throw ConfigInvalid("test_function.center", "length must equal params.dim");
  }

  const bool particle = c.experiment == Experiment::simulate_bbm ||
                        c.experiment == Experiment::verify_duality;
  const bool spatial_dual = c.experiment == Experiment::solve_dual ||
                            c.experiment == Experiment::verify_duality ||
                            c.experiment == Experiment::eps_cascade;
  if (particle) {
    if (c.n_reps < 2) throw ConfigInvalid("n_reps", "Monte-Carlo estimates need n_reps >= 2");
    if (!(c.bbm.epsilon > 0.0)) throw ConfigInvalid("bbm.epsilon", "NonPositiveEpsilon");
    if (!(c.bbm.t >= 0.0)) throw ConfigInvalid("bbm.t", "must be >= 0");
    check_sorted_within(c.bbm.observation_times, 0.0, c.bbm.t, "bbm.observation_times");
    if (c.bbm.population_cap < 1) throw ConfigInvalid("bbm.population_cap", "must be >= 1");
    if (c.bbm.martingale_steps > 0 && !c.test_function.has_laplacian()) {
      throw ConfigInvalid("test_function.kind",
                          "MissingDerivative: martingale residual needs constant or gaussian");
    }
  }
  if (spatial_dual) {
    if (p.dim != 1) throw ConfigInvalid("params.dim", "spatial duals are solved for d = 1 only");
    if (!c.test_function.is_continuous()) {
      throw ConfigInvalid("test_function.kind", "spatial duals need a continuous test function");
    }
    if (!(c.dual.pde.dx > 0.0)) throw ConfigInvalid("dual.dx", "must be > 0");
    if (!(c.dual.pde.cfl > 0.0)) throw ConfigInvalid("dual.cfl", "must be > 0");
    if (c.dual.pde.dt > c.dual.pde.cfl * c.dual.pde.dx * c.dual.pde.dx) {
      throw ConfigInvalid("dual.dt", "CFLViolation: dt must be <= cfl dx^2");
    }
    if (!(c.dual.T >= 0.0)) throw ConfigInvalid("dual.T", "must be >= 0");
    if (!(c.dual.pde.epsilon > 0.0)) throw ConfigInvalid("dual.epsilon", "NonPositiveEpsilon");
    if (c.dual.picard.enabled && c.dual.picard.n_intervals < 1) {
      throw ConfigInvalid("dual.picard.n_intervals", "must be >= 1");
    }
    if (c.dual.picard.enabled && c.dual.picard.options.substeps < 1) {
      throw ConfigInvalid("dual.picard.substeps", "must be >= 1");
    }
  }
  const bool feller_run = c.experiment == Experiment::simulate_feller ||
                          c.experiment == Experiment::extinction_stats ||
                          c.experiment == Experiment::decay_study ||
                          c.experiment == Experiment::certificate;
  if (feller_run) {
    if (!(c.feller.scheme.dt > 0.0)) throw ConfigInvalid("feller.dt", "must be > 0");
    if (!(c.feller.scheme.p_floor >= 0.0)) throw ConfigInvalid("feller.p_floor", "must be >= 0");
    if (!(c.feller.T > 0.0)) throw ConfigInvalid("feller.T", "must be > 0");
    check_sorted_within(c.feller.observation_times, 0.0, c.feller.T, "feller.observation_times");
    for (const double dt : c.feller.dt_ladder) {
      if (!(dt > 0.0)) throw ConfigInvalid("feller.dt_ladder", "every step must be > 0");
    }
  }
  if (c.experiment == Experiment::simulate_feller && c.n_reps < 2) {
    throw ConfigInvalid("n_reps", "Monte-Carlo estimates need n_reps >= 2");
  }
  if (c.experiment == Experiment::eps_cascade) {
    const auto& e = c.cascade.eps_list;
    if (e.empty()) throw ConfigInvalid("cascade.eps_list", "must not be empty");
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (!(e[k] > 0.0) || (k > 0 && !(e[k] < e[k - 1]))) {
        throw ConfigInvalid("cascade.eps_list", "must be positive and strictly decreasing");
      }
    }
    if (!(c.cascade.t >= 0.0)) throw ConfigInvalid("cascade.t", "must be >= 0");
  }
  if (c.experiment == Experiment::decay_study) {
    if (c.n_reps < 2) throw ConfigInvalid("n_reps", "ordering tests need n_reps >= 2");
    check_sorted_within(c.decay.checkpoints, 0.0, 1e300, "decay.checkpoints");
    check_sorted_within(c.decay.w_checkpoints, 0.0, 1e300, "decay.w_checkpoints");
    if (!(c.decay.lambda > 0.0)) throw ConfigInvalid("decay.lambda", "NonPositiveLambda");
    for (int j : c.decay.columns) {
      if (j != 1 && j != 2) throw ConfigInvalid("decay.columns", "entries must be 1 or 2");
    }
    if (c.decay.w_reps < 2) throw ConfigInvalid("decay.w_reps", "must be >= 2");
  }
  if (c.experiment == Experiment::certificate) {
    for (double y : c.certificate.y_values) {
      if (!(y >= 0.0)) throw ConfigInvalid("certificate.y_values", "entries must be >= 0");
    }
    if (!(c.certificate.p0 >= 0.0)) throw ConfigInvalid("certificate.p0", "must be >= 0");
    if (!(c.certificate.T > 0.0)) throw ConfigInvalid("certificate.T", "must be > 0");
  }
}

}  // namespace onoff::cli
