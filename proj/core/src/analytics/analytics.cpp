#include "onoff/analytics/analytics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "onoff/error.hpp"

namespace onoff::analytics {

Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
  Matrix2 r{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  }
  return r;
}

double max_abs_difference(const Matrix2& a, const Matrix2& b) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  }
  return m;
}

std::pair<double, double> mean_solution(const ModelParams& params, double g0, double h0,
                                        double t) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be >= 0");
  const double k = params.c + params.c_tilde;
  const double total = g0 + h0;
  const double flux = params.c * g0 - params.c_tilde * h0;
  const double e = std::exp(-k * t);
  return {(params.c_tilde * total + flux * e) / k, (params.c * total - flux * e) / k};
}

MeanMatrix mean_matrix(const ModelParams& params, double t) {
  MeanMatrix m;
  m.t = t;
  const auto [a0, a1] = mean_solution(params, 1.0, 0.0, t);
  const auto [d0, d1] = mean_solution(params, 0.0, 1.0, t);
  m.entries = {{{a0, a1}, {d0, d1}}};
  return m;
}

ResolventMatrix resolvent(const ModelParams& params, double lambda) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("lambda must be > 0");
  const double c = params.c;
  const double ct = params.c_tilde;
  const double den = (lambda + ct) * (lambda + c) - c * ct;
  ResolventMatrix r;
  r.lambda = lambda;
  r.entries = {{{(lambda + ct) / den, c / den}, {ct / den, (lambda + c) / den}}};
  return r;
}

ResolventQuadrature resolvent_quadrature(const ModelParams& params, double lambda,
                                         double tail_tol) {
  const ResolventMatrix closed = resolvent(params, lambda);
  ResolventQuadrature out;
  // Every entry of M(t) is at most 1, so the tail is at most e^{-lambda T*} / lambda.
  out.t_star = std::log(1.0 / (lambda * tail_tol)) / lambda;
  // Split at the relaxation scale so both pieces are smooth on their range.
  const double split = std::min(out.t_star, 10.0 / (params.c + params.c_tilde));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto f = [&](double t) { return std::exp(-lambda * t) * mean_matrix(params, t).entries[i][j]; };
      using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
      out.entries[i][j] = GK::integrate(f, 0.0, split, 15, 1e-14) +
                          GK::integrate(f, split, out.t_star, 15, 1e-14);
    }
  }
  out.max_abs_difference = max_abs_difference(out.entries, closed.entries);
  return out;
}

double supermartingale_W(double t, double p, double q, const ResolventMatrix& H, int j) {
  if (j != 1 && j != 2) throw InvalidArgument("j must be 1 or 2");
  const auto col = static_cast<std::size_t>(j - 1);
  return std::exp(H.lambda * t) * (p * H.entries[0][col] + q * H.entries[1][col]);
}

std::vector<double> supermartingale_W(const feller::FellerPath& path, const ModelParams& params,
                                      double lambda, int j) {
  const ResolventMatrix H = resolvent(params, lambda);
  std::vector<double> w(path.states.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = supermartingale_W(path.times[k], path.states[k].p, path.states[k].q, H, j);
  }
  return w;
}

WDecayReport w_decay_report(const feller::FellerEnsemble& ensemble, double lambda, int j,
                            double z) {
  const ResolventMatrix H = resolvent(ensemble.params, lambda);
  WDecayReport rep;
  rep.lambda = lambda;
  rep.j = j;
  rep.times = ensemble.times;
  std::vector<std::vector<double>> samples;
  const auto col = static_cast<std::size_t>(j - 1);
  for (std::size_t k = 0; k < ensemble.times.size(); ++k) {
    const double t = ensemble.times[k];
    const auto p = ensemble.p_at(k);
    const auto q = ensemble.q_at(k);
    std::vector<double> w(ensemble.n_paths);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = supermartingale_W(t, p[i], q[i], H, j);
    rep.W.push_back(summarize(w));
    const MeanMatrix m = mean_matrix(ensemble.params, t);
    const double ep = ensemble.initial.p * m.entries[0][0] + ensemble.initial.q * m.entries[1][0];
    const double eq = ensemble.initial.p * m.entries[0][1] + ensemble.initial.q * m.entries[1][1];
    rep.expected.push_back(std::exp(lambda * t) * (ep * H.entries[0][col] + eq * H.entries[1][col]));
    samples.push_back(std::move(w));
  }
  rep.ordering = nonincreasing_within(samples, z);
  return rep;
}

BoundaryCertificate boundary_certificate(const ModelParams& params, double y) {
  if (!(y >= 0.0)) throw InvalidArgument("boundary point needs y >= 0");
  BoundaryCertificate cert;
  cert.params = params;
  cert.y = y;
  cert.generator_p1 = params.c_tilde * y;
  cert.drift_inward = cert.generator_p1 >= 0.0;
  cert.speed_bound = 2.0 * params.c_tilde * y <= 1.0;
  cert.pass = cert.drift_inward && cert.speed_bound;
  cert.threshold = 1.0 / (2.0 * params.c_tilde);
  cert.h = {params.gamma, 0.0};
  cert.diffusion = {{{0.0, 0.0}, {0.0, 0.0}}};  // diag(gamma x1, 0) at x1 = 0
  cert.classification_threshold = params.gamma / (2.0 * params.c_tilde);
  cert.classification_strict = 2.0 * cert.generator_p1 - cert.h[0] < 0.0;
  cert.note =
      "verdict uses 2 c_tilde y <= 1; with a11 = gamma x1 the h-vector is (gamma, 0) and the "
      "strict classification condition is 2 c_tilde y < gamma";
  return cert;
}

}  // namespace onoff::analytics
