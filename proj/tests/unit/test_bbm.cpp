#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "onoff/bbm/ensemble.hpp"
#include "onoff/bbm/martingale.hpp"
#include "onoff/bbm/particle_system.hpp"
#include "onoff/error.hpp"

namespace onoff::bbm {
namespace {

constexpr double kOrigin[] = {0.0};

TEST(ParticleSystem, SingleActiveEventProbabilities) {
  // eps = 1, gamma = 1, c = 1: P(dormant) = 1/2, P(death) = P(split) = 1/4.
  const ModelParams params{1.0, 1.0, 0.5, 1};
  const int reps = 20000;
  int dormant = 0, death = 0, split = 0;
  for (int k = 0; k < reps; ++k) {
    RandomSource rng(101, static_cast<std::uint64_t>(k));
    ParticleSystem sys(params, 1.0);
    sys.add(kOrigin, State::active);
    const auto ev = sys.next_event(rng);
    ASSERT_TRUE(ev);
    switch (ev->kind) {
      case EventKind::to_dormant: ++dormant; break;
      case EventKind::branch_death: ++death; break;
      case EventKind::branch_split: ++split; break;
      case EventKind::to_active: FAIL() << "active particle cannot resuscitate";
    }
  }
  auto check = [&](int count, double p) {
    EXPECT_NEAR(count / double(reps), p, 3.0 * std::sqrt(p * (1 - p) / reps));
  };
  check(dormant, 0.5);
  check(death, 0.25);
  check(split, 0.25);
}

TEST(ParticleSystem, SingleDormantWakesUpInPlace) {
  const ModelParams params{1.0, 1.0, 2.0, 1};
  const int reps = 10000;
  std::vector<double> waits;
  for (int k = 0; k < reps; ++k) {
    RandomSource rng(102, static_cast<std::uint64_t>(k));
    ParticleSystem sys(params, 1.0);
    const double x0[] = {0.75};
    const auto id = sys.add(x0, State::dormant);
    const auto ev = sys.next_event(rng);
    ASSERT_TRUE(ev);
    ASSERT_EQ(ev->kind, EventKind::to_active);
    ASSERT_EQ(ev->particle_id, id);
    ASSERT_EQ(sys.find(id)->position[0], 0.75);
    waits.push_back(ev->time);
  }
  const auto s = summarize(waits);
  EXPECT_NEAR(s.mean, 0.5, 3.0 * s.std_error);
}

TEST(ParticleSystem, EmptySystemIsAbsorbing) {
  ParticleSystem sys({1.0, 1.0, 1.0, 1}, 0.5);
  RandomSource rng(1, 1);
  EXPECT_FALSE(sys.next_event(rng));
  EXPECT_EQ(sys.time(), 0.0);
  EXPECT_FALSE(sys.next_event(rng, 3.0));
  EXPECT_EQ(sys.time(), 3.0);
}

TEST(ParticleSystem, HorizonStopsWithoutEvent) {
  ParticleSystem sys({1.0, 1.0, 1.0, 1}, 1.0);
  sys.add(kOrigin, State::active);
  RandomSource rng(1, 2);
  EXPECT_FALSE(sys.next_event(rng, 1e-12));
  EXPECT_EQ(sys.time(), 1e-12);
  EXPECT_THROW(sys.next_event(rng, 0.0), InvalidArgument);
}

TEST(ParticleSystem, TotalRateAndMasses) {
  const ModelParams params{1.0, 2.0, 3.0, 1};
  ParticleSystem sys(params, 0.5);
  EXPECT_EQ(total_masses(sys), std::make_pair(0.0, 0.0));
  for (int i = 0; i < 3; ++i) sys.add(kOrigin, State::active);
  for (int i = 0; i < 2; ++i) sys.add(kOrigin, State::dormant);
  EXPECT_EQ(total_masses(sys), std::make_pair(1.5, 1.0));
  EXPECT_DOUBLE_EQ(sys.total_rate(), 3.0 * (1.0 / 0.5 + 2.0) + 2.0 * 3.0);
}

TEST(ParticleSystem, DormantPositionsAreFrozen) {
  const ModelParams params{1.0, 2.0, 1.0, 2};
  ParticleSystem sys(params, 0.25);
  RandomSource rng(103, 0);
  for (int i = 0; i < 40; ++i) {
    const double x[] = {0.1 * i, -0.2 * i};
    sys.add(x, i % 2 ? State::active : State::dormant);
  }
  std::map<std::uint64_t, std::vector<double>> frozen;
  for (std::uint64_t id = 0; id < 40; ++id) {
    const auto info = sys.find(id);
    if (info->state == State::dormant) frozen[id] = info->position;
  }
  std::size_t checked = 0;
  for (int step = 0; step < 20000 && !sys.empty(); ++step) {
    const auto ev = sys.next_event(rng);
    ASSERT_TRUE(ev);
    if (ev->kind == EventKind::to_dormant) frozen[ev->particle_id] = sys.find(ev->particle_id)->position;
    if (ev->kind == EventKind::to_active) {
      ASSERT_EQ(sys.find(ev->particle_id)->position, frozen.at(ev->particle_id));
      frozen.erase(ev->particle_id);
    }
    if (step % 97 == 0) sys.sync(rng);
    for (const auto& [id, x] : frozen) {
      const auto info = sys.find(id);
      ASSERT_TRUE(info);
      ASSERT_EQ(info->state, State::dormant);
      ASSERT_EQ(info->position, x);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(ParticleSystem, PopulationCapIsEnforced) {
  ParticleSystem sys({1.0, 1e-9, 1.0, 1}, 0.01, 50);
  // Started at the cap, so the first birth must throw unless the line dies out first.
  for (int i = 0; i < 50; ++i) sys.add(kOrigin, State::active);
  RandomSource rng(104, 0);
  EXPECT_THROW(
      {
        for (int i = 0; i < 1000000; ++i) sys.next_event(rng);
      },
      PopulationCapExceeded);
}

TEST(SimulateUntil, PureBrownianMotionWithoutBranching) {
  // gamma = 0 and c = 0: no events, every particle diffuses with variance t.
  const ModelParams params{0.0, 0.0, 1.0, 1};
  const double t = 2.0;
  std::vector<double> x;
  for (int k = 0; k < 2000; ++k) {
    RandomSource rng(105, static_cast<std::uint64_t>(k));
    ParticleSystem sys(params, 1.0);
    for (int i = 0; i < 5; ++i) sys.add(kOrigin, State::active);
    const double times[] = {t};
    const auto traj = simulate_until(sys, t, rng, times, {.record_particles = true});
    ASSERT_EQ(traj.back().n_active, 5u);
    for (double v : traj.back().particles->positions) x.push_back(v * v);
  }
  const auto s = summarize(x);
  EXPECT_NEAR(s.mean, t, 3.0 * s.std_error);
}

TEST(SimulateUntil, RejectsUnsortedObservationTimes) {
  ParticleSystem sys({1.0, 1.0, 1.0, 1}, 1.0);
  RandomSource rng(1, 3);
  const double times[] = {0.5, 0.2};
  EXPECT_THROW(simulate_until(sys, 1.0, rng, times), InvalidArgument);
}

TEST(SimulateUntil, CriticalCountConservationAtUnitEpsilon) {
  const ModelParams params{1.0, 1.0, 0.5, 1};
  const double times[] = {0.5, 1.0, 2.0};
  std::vector<std::vector<double>> counts(3);
  for (int k = 0; k < 10000; ++k) {
    RandomSource rng(106, static_cast<std::uint64_t>(k));
    ParticleSystem sys(params, 1.0);
    for (int i = 0; i < 3; ++i) sys.add(kOrigin, State::active);
    const auto traj = simulate_until(sys, 2.0, rng, times);
    for (int j = 0; j < 3; ++j) counts[j].push_back(double(traj[j].n_active + traj[j].n_dormant));
  }
  for (const auto& c : counts) {
    const auto s = summarize(c);
    EXPECT_NEAR(s.mean, 3.0, 3.0 * s.std_error);
  }
}

// Two-state chain oracle: mean fraction of [0, t] spent dormant.
double occupation_oracle(const ModelParams& p, State start, double t) {
  const double k = p.c + p.c_tilde;
  const double stationary = p.c / k;
  const double transient = (start == State::dormant ? p.c_tilde : -p.c) / k;
  return stationary + transient * (-std::expm1(-k * t)) / (k * t);
}

TEST(DormantOccupation, FastResuscitationLeavesLittleDormantTime) {
  const ModelParams params{1.0, 1.0, 1000.0, 1};
  const auto occ = dormant_occupation(params, State::dormant, 1.0, 4000, {.master_seed = 107});
  EXPECT_LT(occ.dormant_fraction.mean, 0.005);
  EXPECT_NEAR(occ.dormant_fraction.mean, occupation_oracle(params, State::dormant, 1.0),
              3.0 * occ.dormant_fraction.std_error);
}

TEST(DormantOccupation, ApproachesStationaryLaw) {
  const ModelParams params{1.0, 1.0, 3.0, 1};
  for (State start : {State::active, State::dormant}) {
    const auto occ = dormant_occupation(params, start, 20.0, 3000, {.master_seed = 108});
    EXPECT_NEAR(occ.dormant_fraction.mean, occupation_oracle(params, start, 20.0),
                3.0 * occ.dormant_fraction.std_error);
    EXPECT_NEAR(occ.dormant_fraction.mean, 0.25, 0.02);
  }
}

TEST(LaplaceFunctional, ZeroPhiIsExactlyOne) {
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  const auto est = laplace_functional_mc(mu, TestFunction::constant(0.0, 0.0), 1.0, 0.1, 50,
                                         {1.0, 1.0, 0.5, 1}, {.master_seed = 1});
  EXPECT_EQ(est.estimate, 1.0);
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(LaplaceFunctional, RequiresTwoReplicates) {
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  EXPECT_THROW(laplace_functional_mc(mu, TestFunction::constant(1.0, 1.0), 1.0, 0.1, 1,
                                     {1.0, 1.0, 0.5, 1}),
               InvalidArgument);
}

TEST(LaplaceFunctional, TimeZeroMatchesPoissonFormula) {
  FiniteMeasure mu(1);
  mu.add({0.0}, State::active, 1.0);
  mu.add({0.5}, State::dormant, 0.5);
  const auto phi = TestFunction::gaussian(1.0, 2.0, {0.0}, 0.5);
  const double eps = 0.1;
  double exponent = 0.0;
  for (const auto& a : mu.atoms()) {
    exponent += a.weight * (-std::expm1(-eps * phi(a.position, a.state))) / eps;
  }
  const auto est = laplace_functional_mc(mu, phi, 0.0, eps, 20000, {1.0, 1.0, 0.5, 1},
                                         {.master_seed = 110});
  EXPECT_NEAR(est.estimate, std::exp(-exponent), 3.0 * est.std_error);
}

TEST(LaplaceFunctional, MonotoneInPhiUnderCommonRandomNumbers) {
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  const std::vector<TestFunction> phis{TestFunction::gaussian(0.5, 0.5, {0.0}, 0.5),
                                       TestFunction::gaussian(1.0, 1.0, {0.0}, 0.5),
                                       TestFunction::gaussian(1.0, 1.0, {0.0}, 1.0)};
  const auto est = laplace_functional_mc(mu, phis, 1.0, 0.2, 2000, {1.0, 1.0, 0.5, 1},
                                         {.master_seed = 111});
  EXPECT_GE(est[0].estimate, est[1].estimate);
  EXPECT_GE(est[1].estimate, est[2].estimate);
}

TEST(LaplaceFunctional, BranchingPropertyFactorises) {
  const ModelParams params{1.0, 1.0, 0.5, 1};
  const auto mu1 = FiniteMeasure::dirac({0.0}, State::active, 0.5);
  const auto mu2 = FiniteMeasure::dirac({1.0}, State::dormant, 0.5);
  const auto phi = TestFunction::gaussian(1.0, 1.0, {0.5}, 1.0);
  const std::size_t n = 20000;
  const auto l1 = laplace_functional_mc(mu1, phi, 1.0, 0.2, n, params, {.master_seed = 112});
  const auto l2 = laplace_functional_mc(mu2, phi, 1.0, 0.2, n, params, {.master_seed = 113});
  const auto l12 = laplace_functional_mc(mu1 + mu2, phi, 1.0, 0.2, n, params,
                                         {.master_seed = 114});
  const double product = l1.estimate * l2.estimate;
  const double se_product =
      std::hypot(l1.std_error * l2.estimate, l2.std_error * l1.estimate);
  EXPECT_NEAR(l12.estimate, product, 3.0 * std::hypot(l12.std_error, se_product));
}

TEST(TotalMassEnsemble, CriticalMassConservation) {
  const auto mu = FiniteMeasure::dirac({0.0}, State::active, 1.0);
  const double times[] = {0.5, 1.0, 2.0};
  const auto m = total_mass_ensemble(mu, 0.2, times, 4000, {1.0, 1.0, 0.5, 1},
                                     {.master_seed = 115});
  for (const auto& row : m) EXPECT_NEAR(row.total.mean, 1.0, 3.0 * row.total.std_error);
}

TEST(Martingale, EqualConstantsGiveZeroDrift) {
  const ModelParams params{1.0, 1.0, 0.5, 1};
  const auto phi = TestFunction::constant(2.0, 2.0);
  for (State s : {State::active, State::dormant}) {
    EXPECT_EQ(generator_action(phi, [](auto, State) { return 0.0; }, params,
                               std::vector<double>{0.3}, s),
              0.0);
  }
  RandomSource rng(116, 0);
  ParticleSystem sys(params, poissonize(FiniteMeasure::dirac({0.0}, State::active), 0.2, rng));
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(0.05 * k);
  const auto traj = simulate_until(sys, 1.0, rng, times, {.record_particles = true});
  const auto series = martingale_residual(traj, phi, params);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double pairing = 2.0 * (traj[k].active_mass + traj[k].dormant_mass);
    const double pairing0 = 2.0 * (traj[0].active_mass + traj[0].dormant_mass);
    EXPECT_NEAR(series.residual[k], pairing - pairing0, 1e-12);
  }
}

TEST(Martingale, TentHasNoLaplacian) {
  Trajectory traj(1);
  traj[0].particles = Population{};
  EXPECT_THROW(martingale_residual(traj, TestFunction::tent(1.0, 1.0, {0.0}, 1.0),
                                   {1.0, 1.0, 0.5, 1}),
               MissingDerivative);
}

TEST(Martingale, MeanZeroAndVarianceMatchesQuadraticVariation) {
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  const auto phi = TestFunction::gaussian(1.0, 1.0, {0.0}, 2.0);
  const auto rep = martingale_ensemble(mu, phi, 0.2, 1.0, 100, 4000, {1.0, 1.0, 0.5, 1},
                                       {.master_seed = 117});
  EXPECT_NEAR(rep.residual.mean, 0.0, 3.0 * rep.residual.std_error);
  EXPECT_NEAR(rep.residual.variance / rep.qv_predictor.mean, 1.0, 0.15);
}

}  // namespace
}  // namespace onoff::bbm
