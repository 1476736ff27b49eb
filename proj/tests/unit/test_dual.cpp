#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "onoff/bbm/ensemble.hpp"
#include "onoff/dual/cascade.hpp"
#include "onoff/dual/mechanism.hpp"
#include "onoff/dual/pde.hpp"
#include "onoff/dual/total_mass_dual.hpp"
#include "onoff/error.hpp"

namespace onoff::dual {
namespace {

const ModelParams kParams{1.0, 1.0, 0.5, 1};
const TestFunction kBump = TestFunction::gaussian(1.0, 1.0, {0.0}, 0.5);

// ------------------------------------------------------------- mechanism

TEST(Mechanism, ZeroMapsToZero) {
  const BranchingMechanism m{kParams, 1.0};
  const auto [a, d] = m.at(0.0, 0.0);
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(d, 0.0);
}

TEST(Mechanism, EqualConstantsLeaveOnlyTheQuadraticTerm) {
  const BranchingMechanism m{{3.0, 1.0, 0.5, 1}, 4.0};
  const double k = 1.7;
  const auto [a, d] = m.at(k, k);
  EXPECT_NEAR(a, 1.5 * k * k, 1e-14);
  EXPECT_NEAR(d, 0.0, 1e-14);
}

TEST(Mechanism, LowerBoundOnBall) {
  const BranchingMechanism m{kParams, 2.0};
  RandomSource rng(301, 0);
  for (int i = 0; i < 10000; ++i) {
    const double z1 = 2.0 * rng.uniform(), z0 = 2.0 * rng.uniform();
    const auto [a, d] = m.at(z1, z0);
    const double norm = std::max(z1, z0);
    ASSERT_GE(a, -m.Q() * norm);
    ASSERT_GE(d, -m.Q() * norm);
  }
}

TEST(Mechanism, LipschitzConstants) {
  const BranchingMechanism m{{1.0, 1.0, 0.5, 1}, 4.0};
  EXPECT_DOUBLE_EQ(m.L_A(), 8.0);
  EXPECT_DOUBLE_EQ(m.C_A(), 2.5 * 10.0);
  EXPECT_DOUBLE_EQ(ball_radius(1.5, 3), 12.0);
}

TEST(Mechanism, ApplyRejectsFieldsOutsideBall) {
  const BranchingMechanism m{kParams, 1.0};
  const std::vector<double> z1{0.5, 1.5}, z0{0.0, 0.0};
  std::vector<double> o1(2), o0(2);
  EXPECT_THROW(m.apply(z1, z0, o1, o0), OutOfBall);
}

// ----------------------------------------------------- total-mass dual

TEST(TotalMassDual, ZeroIsAFixedPoint) {
  const auto d = solve_total_mass_dual(kParams, 0.0, 0.0, 3.0, 0.1);
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    EXPECT_EQ(d.u[k], 0.0);
    EXPECT_EQ(d.v[k], 0.0);
  }
}

TEST(TotalMassDual, LinearCaseRelaxesAtSwitchingRate) {
  const ModelParams p{0.0, 1.0, 0.5, 1};
  const auto d = solve_total_mass_dual(p, 2.0, 0.5, 4.0, 0.1);
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    EXPECT_NEAR(d.u[k] - d.v[k], 1.5 * std::exp(-1.5 * d.t[k]), 1e-8);
  }
}

TEST(TotalMassDual, StaysInInvariantBox) {
  const auto d = solve_total_mass_dual({4.0, 1.0, 1.0, 1}, 1.0, 2.0, 5.0, 0.05);
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    EXPECT_GE(d.u[k], 0.0);
    EXPECT_GE(d.v[k], 0.0);
    EXPECT_LE(std::max(d.u[k], d.v[k]), 2.0);
  }
}

TEST(TotalMassDual, RefinementMeetsTolerance) {
  const auto d = solve_total_mass_dual(kParams, 0.5, 0.3, 2.0, 0.5);
  EXPECT_LT(d.refinement_gap, 1e-8);
  EXPECT_THROW(solve_total_mass_dual(kParams, -1.0, 0.0, 1.0, 0.1), InvalidArgument);
}

// ------------------------------------------------------------- grid

TEST(Grid, AutoGridCoversMargin) {
  const Grid g = auto_grid(kBump, 1.0, 0.02);
  const double need = kBump.effective_radius(kEffectiveRadiusTol) + kDefaultMarginFactor;
  EXPECT_LE(g.x_min, -need + 1e-12);
  EXPECT_GE(g.x_max(), need - 1e-12);
  EXPECT_NEAR(g.x(1) - g.x(0), 0.02, 1e-15);
}

TEST(Grid, InterpolateClampsOutside) {
  DualField f(Grid::centered(0.0, 1.0, 0.5), 0.0);
  for (std::size_t j = 0; j < f.grid.size(); ++j) f.active[j] = f.grid.x(j);
  EXPECT_DOUBLE_EQ(f.interpolate(0.25, State::active), 0.25);
  EXPECT_DOUBLE_EQ(f.interpolate(5.0, State::active), 1.0);
}

// ----------------------------------------------------------------- PDE

TEST(Pde, ZeroDataStaysZero) {
  const auto zero = TestFunction::constant(0.0, 0.0);
  for (DualVariant v : {DualVariant::sbm, DualVariant::eps}) {
    const auto r = solve_spatial_dual_pde(kParams, zero, 1.0, v, {.dx = 0.05});
    EXPECT_EQ(r.field.sup_norm(), 0.0);
  }
  const auto u = solve_spatial_dual_pde(kParams, zero, 1.0, DualVariant::bbm, {.dx = 0.05});
  for (double x : u.field.active) EXPECT_DOUBLE_EQ(x, 1.0);
  for (double x : u.field.dormant) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(Pde, ConstantDataMatchesTotalMassOde) {
  const auto phi = TestFunction::constant(0.8, 0.3);
  const auto r = solve_spatial_dual_pde(kParams, phi, 2.0, DualVariant::sbm, {.dx = 0.05});
  const auto ode = solve_total_mass_dual(kParams, 0.8, 0.3, 2.0, 0.01);
  for (std::size_t j = 0; j < r.field.grid.size(); ++j) {
    EXPECT_NEAR(r.field.active[j], ode.u_end(), 1e-6);
    EXPECT_NEAR(r.field.dormant[j], ode.v_end(), 1e-6);
  }
}

TEST(Pde, EpsInitialDataBelowPhi) {
  const Grid g = auto_grid(kBump, 1.0, 0.02);
  const auto init = initial_dual_data(kBump, g, DualVariant::eps, 0.4);
  const auto raw = sample(kBump, g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_LE(init.active[j], raw.active[j] * (1.0 + 4e-16));
    EXPECT_NEAR(init.active[j], -std::expm1(-0.4 * raw.active[j]) / 0.4, 1e-15);
  }
}

TEST(Pde, PositiveBoundedAndAccurate) {
  const auto r = solve_spatial_dual_pde(kParams, kBump, 1.0, DualVariant::sbm);
  EXPECT_TRUE(r.field.finite());
  EXPECT_GE(r.field.min_value(), 0.0);
  EXPECT_LE(r.field.sup_norm(), kBump.sup_bound());
  EXPECT_LT(r.error_estimate, 1e-4);
  EXPECT_LT(r.boundary_deviation, kLeakTolerance);
}

TEST(Pde, MonotoneInPhi) {
  const auto small = TestFunction::gaussian(0.5, 0.8, {0.0}, 0.5);
  const PdeOptions opts{.grid = auto_grid(kBump, 1.0, 0.02), .richardson = false};
  const auto a = solve_spatial_dual_pde(kParams, small, 1.0, DualVariant::sbm, opts);
  const auto b = solve_spatial_dual_pde(kParams, kBump, 1.0, DualVariant::sbm, opts);
  for (std::size_t j = 0; j < a.field.grid.size(); ++j) {
    EXPECT_LE(a.field.active[j], b.field.active[j] + 1e-15);
    EXPECT_LE(a.field.dormant[j], b.field.dormant[j] + 1e-15);
  }
}

TEST(Pde, CflViolationIsReported) {
  PdeOptions opts;
  opts.dx = 0.02;
  opts.dt = 1e-3;
  EXPECT_THROW(solve_spatial_dual_pde(kParams, kBump, 1.0, DualVariant::sbm, opts),
               CFLViolation);
}

TEST(Pde, NarrowDomainLeaks) {
  PdeOptions opts;
  opts.grid = Grid::centered(0.0, 1.0, 0.02);
  opts.richardson = false;
  EXPECT_THROW(solve_spatial_dual_pde(kParams, kBump, 1.0, DualVariant::sbm, opts), BoundaryLeak);
}

TEST(Pde, RejectsDiscontinuousPhi) {
  EXPECT_THROW(solve_spatial_dual_pde(kParams, TestFunction::ball(1.0, 1.0, {0.0}, 1.0), 1.0,
                                      DualVariant::sbm),
               InvalidArgument);
}

TEST(Pde, EvolutionIsASemigroup) {
  const Grid g = auto_grid(kBump, 1.0, 0.02);
  const auto init = initial_dual_data(kBump, g, DualVariant::sbm, 0.0);
  const auto whole = evolve_dual(kParams, init, 1.0, DualVariant::sbm, {.dt = 1e-4});
  const auto half = evolve_dual(kParams, init, 0.5, DualVariant::sbm, {.dt = 1e-4});
  const auto twice = evolve_dual(kParams, half, 0.5, DualVariant::sbm, {.dt = 1e-4});
  EXPECT_LT(sup_difference(whole, twice), 1e-12);
}

// The unscaled particle system (eps = 1, one particle at the origin) has
// E exp(-<Z_t, phi>) = u_t(0, active) for the bbm dual.
TEST(Pde, BbmDualMatchesParticleSystem) {
  const ModelParams p{2.0, 1.0, 0.5, 1};
  const auto phi = TestFunction::gaussian(1.0, 1.0, {0.0}, 0.5);
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  const auto mc = bbm::laplace_functional_mc(mu, phi, 1.0, 1.0, 40000, p,
                                             {.master_seed = 302, .poisson_start = false});
  const auto u = solve_spatial_dual_pde(p, phi, 1.0, DualVariant::bbm, {.dx = 0.02});
  const double particle_rate = u.field.interpolate(0.0, State::active);
  EXPECT_NEAR(mc.estimate, particle_rate, 3.0 * mc.std_error + u.error_estimate);

  PdeOptions half;
  half.bbm_reaction = BbmReaction::half_rate;
  const auto w = solve_spatial_dual_pde(p, phi, 1.0, DualVariant::bbm, half);
  EXPECT_GT(std::abs(mc.estimate - w.field.interpolate(0.0, State::active)),
            5.0 * mc.std_error);
}

// ------------------------------------------------------------- cascade

TEST(Cascade, GapsShrinkWithEpsilon) {
  const std::vector<double> eps{0.4, 0.2, 0.1};
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  const auto table = eps_cascade(kParams, kBump, 1.0, eps, mu, {.richardson = false});
  ASSERT_EQ(table.rows.size(), 3u);
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    EXPECT_LT(table.rows[k].sup_gap, table.rows[k - 1].sup_gap);
  }
  // First-order decay: gap / eps stays within a fixed multiple of the initial-data gap / eps.
  for (const auto& row : table.rows) {
    EXPECT_LT(row.sup_gap / row.epsilon, 1.0);
    EXPECT_LE(row.initial_gap, 0.5 * row.epsilon * kBump.sup_bound() * kBump.sup_bound() + 1e-15);
  }
  EXPECT_LT(table.rows.back().sup_gap, 0.05 * kBump.sup_bound());
}

TEST(Cascade, ZeroPhiHasZeroGaps) {
  const std::vector<double> eps{0.4, 0.1};
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  const auto table =
      eps_cascade(kParams, TestFunction::constant(0.0, 0.0), 1.0, eps, mu, {.dx = 0.05});
  for (const auto& row : table.rows) EXPECT_EQ(row.sup_gap, 0.0);
}

TEST(Cascade, RejectsIncreasingEpsilons) {
  const std::vector<double> eps{0.1, 0.2};
  const auto mu = FiniteMeasure::dirac({0.0}, State::active);
  EXPECT_THROW(eps_cascade(kParams, kBump, 1.0, eps, mu), InvalidArgument);
}

}  // namespace
}  // namespace onoff::dual
