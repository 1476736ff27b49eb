#include "onoff/dual/picard.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "onoff/error.hpp"
#include "onoff/random.hpp"

namespace onoff::dual {

const char* to_string(InnerExpectation inner) {
  return inner == InnerExpectation::pde ? "pde" : "feynman-kac-mc";
}

struct HeatSemigroup::Impl {
  Eigen::MatrixXd matrix;
};

HeatSemigroup::HeatSemigroup(const Grid& grid, double h) : impl_(std::make_unique<Impl>()), h_(h) {
  if (!(h >= 0.0)) throw InvalidArgument("heat semigroup step must be >= 0");
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (n == 1) {
    impl_->matrix = Eigen::MatrixXd::Identity(1, 1);
    return;
  }
  // S = W^{1/2} D2 W^{-1/2} with trapezoid weights W = diag(1/2, 1, ..., 1, 1/2).
  Eigen::VectorXd sw = Eigen::VectorXd::Ones(n);
  sw(0) = sw(n - 1) = std::sqrt(0.5);
  const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d2(j, j) = -2.0 * inv_dx2;
    if (j == 0) {
      d2(0, 1) = 2.0 * inv_dx2;
    } else if (j == n - 1) {
      d2(j, j - 1) = 2.0 * inv_dx2;
    } else {
      d2(j, j - 1) = d2(j, j + 1) = inv_dx2;
    }
  }
  const Eigen::MatrixXd s = sw.asDiagonal() * d2 * sw.cwiseInverse().asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()));
  const Eigen::VectorXd decay = (0.5 * h * eig.eigenvalues().array()).exp();
  const Eigen::MatrixXd sym =
      eig.eigenvectors() * decay.asDiagonal() * eig.eigenvectors().transpose();
  impl_->matrix = sw.cwiseInverse().asDiagonal() * sym * sw.asDiagonal();
}

HeatSemigroup::~HeatSemigroup() = default;
HeatSemigroup::HeatSemigroup(HeatSemigroup&&) noexcept = default;
HeatSemigroup& HeatSemigroup::operator=(HeatSemigroup&&) noexcept = default;

void HeatSemigroup::apply(std::span<const double> in, std::span<double> out) const {
  const auto n = impl_->matrix.rows();
  Eigen::Map<const Eigen::VectorXd> x(in.data(), n);
  Eigen::Map<Eigen::VectorXd> y(out.data(), n);
  y.noalias() = impl_->matrix * x;
}

namespace {

using Field = std::vector<double>;

/// Average of linear interpolation at x_j + B_k over sampled displacements,
/// stored as merged (offset, weight) taps; values outside the grid take the
/// boundary value.
struct ShiftAverage {
  std::vector<std::pair<long, double>> taps;

  void apply(const Field& in, Field& out) const {
    const auto n = static_cast<long>(in.size());
    for (long j = 0; j < n; ++j) {
      double acc = 0.0;
      for (const auto& [o, w] : taps) acc += w * in[static_cast<std::size_t>(std::clamp(j + o, 0L, n - 1))];
      out[static_cast<std::size_t>(j)] = acc;
    }
  }
};

std::vector<ShiftAverage> brownian_lag_operators(double dx, double h, std::size_t m,
                                                 std::size_t n_paths, RandomSource& rng) {
  const std::size_t pairs = std::max<std::size_t>(1, n_paths / 2);
  const double inv_k = 1.0 / static_cast<double>(2 * pairs);
  std::vector<std::map<long, double>> acc(m + 1);
  const double sh = std::sqrt(h);
  for (std::size_t p = 0; p < pairs; ++p) {
    double b = 0.0;
    for (std::size_t q = 0; q <= m; ++q) {
      if (q > 0) b += sh * rng.normal();
      for (double sign : {1.0, -1.0}) {
        const double u = sign * b / dx;
        const double fl = std::floor(u);
        const double w = u - fl;
        const auto o = static_cast<long>(fl);
        acc[q][o] += (1.0 - w) * inv_k;
        if (w > 0.0) acc[q][o + 1] += w * inv_k;
      }
    }
  }
  std::vector<ShiftAverage> ops(m + 1);
  for (std::size_t q = 0; q <= m; ++q) ops[q].taps.assign(acc[q].begin(), acc[q].end());
  return ops;
}

double sup_abs(const Field& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

PicardResult picard_solve_interval(const BranchingMechanism& mech, const DualField& terminal,
                                   double length, const PicardOptions& options) {
  if (!(length > 0.0)) throw InvalidArgument("interval length must be > 0");
  if (options.substeps < 1) throw InvalidArgument("substeps must be >= 1");
  if (length * mech.C_A() > 0.5 * (1.0 + 1e-12)) {
    throw ContractionViolated("|Delta| C_A = " + std::to_string(length * mech.C_A()) +
                              " exceeds 1/2");
  }
  if (terminal.sup_norm() > mech.A * (1.0 + 1e-12)) {
    throw OutOfBall("terminal data outside the ball of radius " + std::to_string(mech.A));
  }
  const std::size_t m = options.substeps;
  const std::size_t n = terminal.grid.size();
  const double h = length / static_cast<double>(m);

  std::optional<HeatSemigroup> heat;
  std::vector<ShiftAverage> lag_ops;
  if (options.inner == InnerExpectation::pde) {
    heat.emplace(terminal.grid, h);
  } else {
    RandomSource rng(options.fk_seed, 0);
    lag_ops = brownian_lag_operators(terminal.grid.dx, h, m, options.fk_paths, rng);
  }

  // F_l = P_{l h} f on the active component; the dormant component is frozen.
  std::vector<Field> free_active(m + 1, Field(n));
  free_active[0] = terminal.active;
  for (std::size_t l = 1; l <= m; ++l) {
    if (heat) {
      heat->apply(free_active[l - 1], free_active[l]);
    } else {
      lag_ops[l].apply(terminal.active, free_active[l]);
    }
  }

  std::vector<Field> za = free_active;
  std::vector<Field> zd(m + 1, terminal.dormant);
  std::vector<Field> ga(m + 1, Field(n)), gd(m + 1, Field(n));
  std::vector<Field> ia(m + 1, Field(n, 0.0)), id(m + 1, Field(n, 0.0));
  Field tmp(n), tmp2(n);

  PicardResult res;
  double prev_diff = 0.0;
  for (std::size_t it = 1;; ++it) {
    for (std::size_t l = 0; l <= m; ++l) mech.apply(za[l], zd[l], ga[l], gd[l]);

    std::fill(ia[0].begin(), ia[0].end(), 0.0);
    std::fill(id[0].begin(), id[0].end(), 0.0);
    for (std::size_t l = 0; l < m; ++l) {
      for (std::size_t j = 0; j < n; ++j) {
        id[l + 1][j] = id[l][j] + 0.5 * h * (gd[l][j] + gd[l + 1][j]);
      }
    }
    if (heat) {
      for (std::size_t l = 0; l < m; ++l) {
        for (std::size_t j = 0; j < n; ++j) tmp[j] = ia[l][j] + 0.5 * h * ga[l][j];
        heat->apply(tmp, ia[l + 1]);
        for (std::size_t j = 0; j < n; ++j) ia[l + 1][j] += 0.5 * h * ga[l + 1][j];
      }
    } else {
      for (std::size_t l = 1; l <= m; ++l) {
        std::fill(ia[l].begin(), ia[l].end(), 0.0);
        for (std::size_t i = 0; i <= l; ++i) {
          const double w = (i == 0 || i == l) ? 0.5 * h : h;
          lag_ops[l - i].apply(ga[i], tmp2);
          for (std::size_t j = 0; j < n; ++j) ia[l][j] += w * tmp2[j];
        }
      }
    }

    double diff = 0.0;
    for (std::size_t l = 0; l <= m; ++l) {
      for (std::size_t j = 0; j < n; ++j) {
        const double a = free_active[l][j] - ia[l][j];
        const double d = terminal.dormant[j] - id[l][j];
        diff = std::max({diff, std::abs(a - za[l][j]), std::abs(d - zd[l][j])});
        za[l][j] = a;
        zd[l][j] = d;
      }
    }
    res.differences.push_back(diff);
    if (it > 1 && prev_diff > 1e-12) {
      const double ratio = diff / prev_diff;
      res.contraction_ratios.push_back(ratio);
      res.max_ratio = std::max(res.max_ratio, ratio);
    }
    prev_diff = diff;
    res.iterations = it;
    if (diff < options.tol) break;
    if (it >= options.max_iterations) {
      throw NoConvergence("Picard iteration did not converge in " +
                          std::to_string(options.max_iterations) + " iterations");
    }
  }

  for (std::size_t l = 0; l <= m; ++l) {
    res.max_abs = std::max({res.max_abs, sup_abs(za[l]), sup_abs(zd[l])});
  }
  res.field = DualField(terminal.grid, terminal.time + length);
  res.field.active = za[m];
  res.field.dormant = zd[m];
  return res;
}

double max_glue_horizon(const ModelParams& params, double phi_sup, int n_intervals) {
  const BranchingMechanism mech{params, ball_radius(phi_sup, n_intervals)};
  return 0.5 * static_cast<double>(n_intervals) / mech.C_A();
}

GlueResult glue_intervals(const ModelParams& params, const DualField& terminal, double phi_sup,
                          double T, int n_intervals, const PicardOptions& options) {
  if (!(T > 0.0)) throw InvalidArgument("T must be > 0");
  GlueResult out;
  out.A = ball_radius(phi_sup, n_intervals);
  const BranchingMechanism mech{params, out.A};
  out.C_A = mech.C_A();
  out.interval_length = T / static_cast<double>(n_intervals);
  if (out.interval_length * out.C_A > 0.5 * (1.0 + 1e-12)) {
    throw ContractionViolated("T C_A / n = " + std::to_string(out.interval_length * out.C_A) +
                              " exceeds 1/2");
  }
  DualField current = terminal;
  out.max_abs = current.sup_norm();
  for (int k = 0; k < n_intervals; ++k) {
    PicardOptions opts = options;
    opts.fk_seed = options.fk_seed + static_cast<std::uint64_t>(k);
    PicardResult stage = picard_solve_interval(mech, current, out.interval_length, opts);
    out.max_abs = std::max(out.max_abs, stage.max_abs);
    current = stage.field;
    out.stages.push_back(std::move(stage));
  }
  out.field = std::move(current);
  return out;
}

GlueResult glue_intervals(const ModelParams& params, const TestFunction& phi, const Grid& grid,
                          double T, int n_intervals, const PicardOptions& options) {
  return glue_intervals(params, sample(phi, grid), phi.sup_bound(), T, n_intervals, options);
}

}  // namespace onoff::dual
