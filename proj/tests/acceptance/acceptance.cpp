// End-to-end acceptance checks. Each criterion runs the shipped configs
// through the experiment runner and prints one PASS/FAIL line.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "onoff/analytics/analytics.hpp"
#include "onoff/cli/config.hpp"
#include "onoff/cli/experiments.hpp"
#include "onoff/cli/report.hpp"

namespace {

using namespace onoff;
using namespace onoff::cli;

std::string g_config_dir = ONOFF_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << (ok ? "" : "!") << what;
  }
};

struct Timed {
  RunResult result;
  double seconds = 0.0;
};

ExperimentConfig config(const std::string& name) {
  auto c = load_config(g_config_dir + "/" + name + ".yaml");
  c.workers = 0;
  return c;
}

Timed run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  Timed t{run_experiment(c), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

/// Requires every verdict whose name starts with `prefix`; at least `min_count` must exist.
void require_verdicts(Outcome& o, const RunResult& r, const std::string& prefix,
                      std::size_t min_count = 1) {
  std::size_t seen = 0;
  for (const Verdict& v : r.verdicts) {
    if (!starts_with(v.name, prefix)) continue;
    ++seen;
    o.require(v.pass, v.name + " value=" + format_number(v.value) +
                          " tol=" + format_number(v.tolerance));
  }
  o.require(seen >= min_count, prefix + " checks=" + std::to_string(seen));
}

void require_runtime(Outcome& o, const Timed& t, double limit) {
  o.require(t.seconds <= limit, "runtime " + format_number(std::round(t.seconds * 10) / 10) +
                                    "s <= " + format_number(limit) + "s");
}

Outcome c1_mgf_duality() {
  Outcome o;
  const auto t = run(config("feller-mgf"));
  require_verdicts(o, t.result, "MGF duality", 3);
  require_runtime(o, t, 120.0);
  return o;
}

Outcome c2_particle_duality() {
  Outcome o;
  const auto t = run(config("verify-duality"));
  require_verdicts(o, t.result, "Laplace duality");
  require_runtime(o, t, 300.0);
  return o;
}

Outcome c3_cascade() {
  Outcome o;
  const auto t = run(config("eps-cascade"));
  require_verdicts(o, t.result, "gap", 2);
  require_runtime(o, t, 60.0);
  return o;
}

Outcome c4_mass_conservation() {
  Outcome o;
  require_verdicts(o, run(config("bbm-mass")).result, "mass conservation", 3);
  const auto feller = run(config("feller-mgf")).result;
  for (const char* t : {"0.5", "1", "2"}) {
    require_verdicts(o, feller, std::string("mean r t=") + t);
  }
  return o;
}

Outcome c5_mean_system() {
  Outcome o;
  const auto r = run(config("feller-mgf")).result;
  require_verdicts(o, r, "mean p t=", 5);
  require_verdicts(o, r, "mean q t=", 5);
  const ModelParams p{1.0, 1.0, 0.5, 1};
  const auto m1 = analytics::mean_matrix(p, 1.0);
  const double gap = analytics::max_abs_difference(analytics::multiply(m1.entries, m1.entries),
                                                   analytics::mean_matrix(p, 2.0).entries);
  o.require(gap <= 1e-10, "M(1)M(1)-M(2) = " + format_number(gap));
  return o;
}

Outcome c6_persistence() {
  Outcome o;
  require_verdicts(o, run(config("persistence")).result, "seed-bank lower bound");
  return o;
}

Outcome c7_extinction() {
  Outcome o;
  require_verdicts(o, run(config("extinction")).result, "", 2);
  require_verdicts(o, run(config("extinction-distant")).result, "");
  return o;
}

Outcome c8_decay() {
  Outcome o;
  const auto r = run(config("decay")).result;
  require_verdicts(o, r, "mean r_t");
  require_verdicts(o, r, "W supermartingale", 2);
  return o;
}

Outcome c9_picard() {
  Outcome o;
  const auto r = run(config("picard")).result;
  require_verdicts(o, r, "Picard contraction ratio");
  require_verdicts(o, r, "glued Picard vs method of lines");
  require_verdicts(o, r, "A-ball bound");
  const auto& s = r.statistics["picard"];
  const double load = s["interval_length"].get<double>() * s["C_A"].get<double>();
  o.require(load <= 0.5 + 1e-12, "|Delta| C_A = " + format_number(load));
  return o;
}

Outcome c10_martingale() {
  Outcome o;
  const auto r = run(config("martingale")).result;
  require_verdicts(o, r, "martingale mean");
  require_verdicts(o, r, "martingale variance");
  return o;
}

Outcome c11_determinism() {
  Outcome o;
  auto feller = config("feller-mgf");
  feller.n_reps = 20000;
  feller.feller.dt_ladder.clear();
  for (ExperimentConfig c : {config("verify-duality"), feller, config("bbm-mass")}) {
    std::string summary[2], tables[2];
    const unsigned workers[2] = {1, 8};
    for (int k = 0; k < 2; ++k) {
      c.workers = workers[k];
      const auto r = run_experiment(c);
      summary[k] = summary_json(c, r).dump();
      for (const auto& t : r.tables) tables[k] += to_csv(t);
    }
    o.require(summary[0] == summary[1] && tables[0] == tables[1],
              std::string(to_string(c.experiment)) + " workers 1 vs 8 byte-identical");
  }
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"Feller-dual MGF duality", c1_mgf_duality},
      {"particle-dual Laplace duality at fixed epsilon", c2_particle_duality},
      {"epsilon cascade", c3_cascade},
      {"critical mean conservation", c4_mass_conservation},
      {"mean-system closed form", c5_mean_system},
      {"persistence", c6_persistence},
      {"active extinction", c7_extinction},
      {"almost-sure decay proxy", c8_decay},
      {"construction machinery", c9_picard},
      {"martingale problem", c10_martingale},
      {"determinism across worker counts", c11_determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")
      ->check(CLI::Range(1, static_cast<int>(criteria().size())));
  app.add_option("--config-dir", g_config_dir, "directory holding the experiment configs");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (std::size_t k = 0; k < criteria().size(); ++k) {
    if (only != 0 && static_cast<int>(k) + 1 != only) continue;
    const auto& c = criteria()[k];
    bool pass = false;
    std::string detail;
    try {
      const Outcome o = c.check();
      pass = o.pass;
      detail = o.detail.str();
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    all = all && pass;
    std::cout << "C" << k + 1 << ' ' << (pass ? "PASS" : "FAIL") << ' ' << c.title << ": "
              << detail << std::endl;
  }
  return all ? 0 : 1;
}
