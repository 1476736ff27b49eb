#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "onoff/cli/config.hpp"
#include "onoff/cli/experiments.hpp"
#include "onoff/cli/report.hpp"

namespace onoff::cli {
namespace {

std::string field_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigInvalid& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Config, DefaultsParse) {
  const auto c = parse_config("experiment: simulate-feller\n");
  EXPECT_EQ(c.experiment, Experiment::simulate_feller);
  EXPECT_EQ(c.feller.scheme.variant, feller::NoiseVariant::generator_consistent);
}

TEST(Config, UnknownExperimentNamesTheField) {
  EXPECT_EQ(field_of("experiment: fly-to-moon\n"), "experiment");
}

TEST(Config, EmptyEnsembleIsRejected) {
  EXPECT_EQ(field_of("experiment: simulate-feller\nn_reps: 0\n"), "n_reps");
}

TEST(Config, NonPositiveRateNamesTheParameter) {
  EXPECT_EQ(field_of("experiment: simulate-feller\nparams: {gamma: 0.0}\n"), "params.gamma");
  EXPECT_EQ(field_of("experiment: simulate-feller\nparams: {c_tilde: -1}\n"), "params.c_tilde");
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_EQ(field_of("experiment: simulate-feller\nfeller: {dtt: 0.1}\n"), "feller.dtt");
}

TEST(Config, WrongTypesNameTheField) {
  EXPECT_EQ(field_of("experiment: simulate-feller\nfeller: {dt: fast}\n"), "feller.dt");
}

TEST(Config, BadVariantNamesTheField) {
  EXPECT_EQ(field_of("experiment: simulate-feller\nfeller: {variant: other}\n"),
            "feller.variant");
}

TEST(Config, ObservationTimesOutsideHorizon) {
  EXPECT_EQ(field_of("experiment: simulate-feller\nfeller: {T: 1.0, observation_times: [2.0]}\n"),
            "feller.observation_times");
}

TEST(Config, ExperimentIdsRoundTrip) {
  for (const auto& id : experiment_ids()) {
    const auto e = parse_experiment(id);
    ASSERT_TRUE(e);
    EXPECT_EQ(to_string(*e), id);
  }
}

TEST(Run, ZeroPhiDualityIsExact) {
  const auto c = parse_config(R"(
experiment: verify-duality
seed: 1
n_reps: 50
test_function: {kind: constant, active: 0.0, dormant: 0.0}
bbm: {epsilon: 0.2, t: 0.5, observation_times: [0.5]}
)");
  const auto r = run_experiment(c);
  ASSERT_EQ(r.verdicts.size(), 1u);
  EXPECT_TRUE(r.verdicts[0].pass);
  EXPECT_EQ(r.statistics["duality"]["mc"].get<double>(), 1.0);
  EXPECT_EQ(r.statistics["duality"]["dual_value"].get<double>(), 1.0);
}

ExperimentConfig small_feller() {
  return parse_config(R"(
experiment: simulate-feller
seed: 9
n_reps: 400
feller:
  T: 0.5
  observation_times: [0.25, 0.5]
  thetas: [[0.5, 0.3], [1.0, 1.0]]
  dt_ladder: []
  mgf_abs_tol: 0.05
)");
}

TEST(Run, MgfTableHasDocumentedColumns) {
  const auto r = run_experiment(small_feller());
  const auto it = std::find_if(r.tables.begin(), r.tables.end(),
                               [](const CsvTable& t) { return t.name == "mgf"; });
  ASSERT_NE(it, r.tables.end());
  EXPECT_EQ(it->header,
            (std::vector<std::string>{"theta1", "theta2", "mc", "dual", "gap", "stderr"}));
  EXPECT_EQ(it->rows.size(), 2u);
  EXPECT_EQ(to_csv(*it).substr(0, 34), "theta1,theta2,mc,dual,gap,stderr\n0");
}

TEST(Run, RepeatedRunsAreByteIdentical) {
  const auto c = small_feller();
  const auto a = run_experiment(c), b = run_experiment(c);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t k = 0; k < a.tables.size(); ++k) EXPECT_EQ(to_csv(a.tables[k]), to_csv(b.tables[k]));
}

TEST(Run, WorkerCountDoesNotChangeSummary) {
  auto c = small_feller();
  c.workers = 1;
  const auto one = summary_json(c, run_experiment(c)).dump();
  c.workers = 8;
  const auto eight = summary_json(c, run_experiment(c)).dump();
  EXPECT_EQ(one, eight);
}

TEST(Report, FileStemIsTimestampFree) {
  auto c = small_feller();
  const auto stem = file_stem(c);
  EXPECT_EQ(stem.rfind("simulate-feller-seed9-", 0), 0u);
  c.workers = 5;
  c.out = "elsewhere";
  EXPECT_EQ(file_stem(c), stem);
  c.seed = 10;
  EXPECT_NE(file_stem(c), stem);
}

TEST(Report, EveryVerdictNamesAnAnchor) {
  const auto r = run_experiment(small_feller());
  for (const auto& v : r.verdicts) EXPECT_FALSE(v.anchor.empty()) << v.name;
}

}  // namespace
}  // namespace onoff::cli
