#include "onoff/cli/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "onoff/analytics/analytics.hpp"
#include "onoff/bbm/ensemble.hpp"
#include "onoff/bbm/martingale.hpp"
#include "onoff/dual/cascade.hpp"
#include "onoff/dual/pde.hpp"
#include "onoff/dual/picard.hpp"
#include "onoff/dual/total_mass_dual.hpp"
#include "onoff/feller/feller.hpp"
#include "onoff/stats.hpp"

namespace onoff::cli {

using json = nlohmann::ordered_json;

bool RunResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

/// JSON-safe number: non-finite values become strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json summary_json(const SampleSummary& s) {
  return {{"n", s.n}, {"mean", num(s.mean)}, {"variance", num(s.variance)},
          {"std_error", num(s.std_error)}};
}

/// Stream offsets keep the sub-ensembles of one experiment independent.
constexpr std::uint64_t kStreamBlock = 1ULL << 40;

bbm::McOptions mc_options(const ExperimentConfig& c, std::uint64_t block = 0) {
  bbm::McOptions mc;
  mc.master_seed = c.seed;
  mc.first_stream = block * kStreamBlock;
  mc.workers = c.workers;
  mc.population_cap = c.bbm.population_cap;
  mc.poisson_start = c.bbm.poisson_start;
  return mc;
}

feller::EnsembleOptions feller_options(const ExperimentConfig& c, std::vector<double> times,
                                       std::uint64_t block = 0) {
  feller::EnsembleOptions o;
  o.master_seed = c.seed;
  o.first_stream = block * kStreamBlock;
  o.workers = c.workers;
  o.observation_times = std::move(times);
  o.stop_on_hit = c.feller.stop_on_hit;
  return o;
}

Verdict within_sigma(std::string name, std::string anchor, double estimate, double se,
                     double expected, double z = 3.0) {
  const double gap = std::abs(estimate - expected);
  const double tol = z * se;
  Verdict v{std::move(name), std::move(anchor), gap <= tol, gap, tol, ""};
  v.detail = "estimate " + fmt(estimate) + " vs " + fmt(expected) + " (stderr " + fmt(se) + ")";
  return v;
}

// ---------------------------------------------------------------- simulate-bbm

void run_simulate_bbm(const ExperimentConfig& c, RunResult& r) {
  const auto& mu = c.initial_measure;
  const double eps = c.bbm.epsilon;
  std::vector<double> times = c.bbm.observation_times;
  if (times.empty()) times.push_back(c.bbm.t);
  const auto moments = bbm::total_mass_ensemble(mu, eps, times, c.n_reps, c.params, mc_options(c));

  CsvTable table{"masses",
                 {"t", "mean_active", "mean_dormant", "mean_total", "se_total", "expected_active",
                  "expected_dormant", "expected_total"},
                 {}};
  json stats = json::array();
  const double total0 = mu.total_mass();
  for (const auto& m : moments) {
    const auto [ea, ed] = analytics::mean_solution(c.params, mu.mass_in(State::active),
                                                   mu.mass_in(State::dormant), m.time);
    table.rows.push_back({fmt(m.time), fmt(m.active.mean), fmt(m.dormant.mean),
                          fmt(m.total.mean), fmt(m.total.std_error), fmt(ea), fmt(ed),
                          fmt(total0)});
    stats.push_back({{"t", m.time},
                     {"active", summary_json(m.active)},
                     {"dormant", summary_json(m.dormant)},
                     {"total", summary_json(m.total)}});
    r.verdicts.push_back(within_sigma("mass conservation t=" + fmt(m.time),
                                      "Prop 2.17 first moment measure", m.total.mean,
                                      m.total.std_error, total0));
    r.verdicts.push_back(within_sigma("active mean t=" + fmt(m.time),
                                      "Prop 2.17 first moment measure", m.active.mean,
                                      m.active.std_error, ea));
  }
  r.statistics["masses"] = stats;
  r.tables.push_back(std::move(table));

  if (c.bbm.martingale_steps > 0) {
    const auto rep = bbm::martingale_ensemble(mu, c.test_function, eps, c.bbm.t,
                                              c.bbm.martingale_steps, c.n_reps, c.params,
                                              mc_options(c, 1));
    r.statistics["martingale"] = {{"t", rep.t},
                                  {"n_obs", rep.n_obs},
                                  {"residual", summary_json(rep.residual)},
                                  {"qv_predictor", summary_json(rep.qv_predictor)}};
    r.verdicts.push_back(within_sigma("martingale mean t=" + fmt(rep.t),
                                      "Thm 2.23 martingale problem", rep.residual.mean,
                                      rep.residual.std_error, 0.0));
    const double rel = std::abs(rep.residual.variance - rep.qv_predictor.mean) /
                       std::max(rep.qv_predictor.mean, std::numeric_limits<double>::min());
    r.verdicts.push_back({"martingale variance vs quadratic variation",
                          "Thm 2.23 quadratic variation", rel <= 0.10, rel, 0.10,
                          "Var M_t " + fmt(rep.residual.variance) + " vs E qv " +
                              fmt(rep.qv_predictor.mean)});
  }

  if (c.bbm.record_particles) {
    RandomSource rng(c.seed, 0);
    bbm::ParticleSystem sys(c.params,
                            bbm::initial_population(mu, eps, rng, c.bbm.poisson_start),
                            c.bbm.population_cap);
    const auto traj = bbm::simulate_until(sys, std::max(c.bbm.t, times.back()), rng, times,
                                          {.record_particles = true});
    CsvTable dump{"particles", {"t"}, {}};
    for (int i = 1; i <= c.params.dim; ++i) dump.header.push_back("x" + std::to_string(i));
    dump.header.push_back("state");
    for (const auto& snap : traj) {
      const Population& pop = *snap.particles;
      for (std::size_t k = 0; k < pop.size(); ++k) {
        std::vector<std::string> row{fmt(snap.time)};
        for (double x : pop.position(k)) row.push_back(fmt(x));
        row.push_back(pop.states[k] == State::active ? "1" : "0");
        dump.rows.push_back(std::move(row));
      }
    }
    r.tables.push_back(std::move(dump));
  }
}

// ------------------------------------------------------------- simulate-feller

void run_simulate_feller(const ExperimentConfig& c, RunResult& r) {
  std::vector<double> times = c.feller.observation_times;
  if (times.empty() || times.back() < c.feller.T) times.push_back(c.feller.T);
  const auto ens = feller::simulate_feller_ensemble(c.params, c.initial_feller, c.feller.scheme,
                                                    c.feller.T, c.n_reps,
                                                    feller_options(c, times));
  const double r0 = c.initial_feller.r();

  CsvTable means{"means",
                 {"t", "mean_p", "se_p", "exact_p", "mean_q", "se_q", "exact_q", "mean_r", "se_r"},
                 {}};
  json mstats = json::array();
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    const double t = ens.times[k];
    const auto sp = summarize(ens.p_at(k));
    const auto sq = summarize(ens.q_at(k));
    const auto sr = summarize(ens.r_at(k));
    const auto [ep, eq] = analytics::mean_solution(c.params, c.initial_feller.p,
                                                   c.initial_feller.q, t);
    means.rows.push_back({fmt(t), fmt(sp.mean), fmt(sp.std_error), fmt(ep), fmt(sq.mean),
                          fmt(sq.std_error), fmt(eq), fmt(sr.mean), fmt(sr.std_error)});
    mstats.push_back({{"t", t}, {"p", summary_json(sp)}, {"q", summary_json(sq)},
                      {"r", summary_json(sr)}});
    r.verdicts.push_back(within_sigma("mean p t=" + fmt(t), "Prop 3.5 mean system", sp.mean,
                                      sp.std_error, ep));
    r.verdicts.push_back(within_sigma("mean q t=" + fmt(t), "Prop 3.5 mean system", sq.mean,
                                      sq.std_error, eq));
    r.verdicts.push_back(within_sigma("mean r t=" + fmt(t), "Prop 2.17 critical mass conservation",
                                      sr.mean, sr.std_error, r0));
  }
  r.statistics["means"] = mstats;
  r.tables.push_back(std::move(means));

  CsvTable mgf{"mgf", {"theta1", "theta2", "mc", "dual", "gap", "stderr"}, {}};
  json gstats = json::array();
  const std::size_t last = ens.times.size() - 1;
  for (const auto& [t1, t2] : c.feller.thetas) {
    const auto s = feller::mgf(ens, last, t1, t2);
    const auto d = dual::solve_total_mass_dual(c.params, t1, t2, ens.times[last], 1e-2);
    const double dual_value = std::exp(-d.u_end() * c.initial_feller.p - d.v_end() * c.initial_feller.q);
    const double gap = std::abs(s.mean - dual_value);
    const double tol = std::max(3.0 * s.std_error, c.feller.mgf_abs_tol);
    mgf.rows.push_back({fmt(t1), fmt(t2), fmt(s.mean), fmt(dual_value), fmt(gap), fmt(s.std_error)});
    gstats.push_back({{"theta1", t1}, {"theta2", t2}, {"mc", s.mean}, {"dual", dual_value},
                      {"gap", gap}, {"stderr", s.std_error}, {"u_T", d.u_end()},
                      {"v_T", d.v_end()}});
    r.verdicts.push_back({"MGF duality theta=(" + fmt(t1) + "," + fmt(t2) + ")",
                          "Prop 3.1 moment generating functions coincide", gap <= tol, gap, tol,
                          "mc " + fmt(s.mean) + " dual " + fmt(dual_value)});
  }
  r.statistics["mgf"] = gstats;
  r.tables.push_back(std::move(mgf));

  // Weak-error ladder: same streams, coarser steps, MGF gap only (reported, not judged).
  if (!c.feller.thetas.empty() && !c.feller.dt_ladder.empty()) {
    CsvTable ladder{"mgf_ladder", {"dt", "theta1", "theta2", "mc", "gap", "stderr"}, {}};
    json lstats = json::array();
    auto run_rung = [&](double dt, const feller::FellerEnsemble& e) {
      for (std::size_t k = 0; k < c.feller.thetas.size(); ++k) {
        const auto [t1, t2] = c.feller.thetas[k];
        const auto s = feller::mgf(e, e.times.size() - 1, t1, t2);
        const double gap = std::abs(s.mean - gstats[k]["dual"].get<double>());
        ladder.rows.push_back({fmt(dt), fmt(t1), fmt(t2), fmt(s.mean), fmt(gap), fmt(s.std_error)});
        lstats.push_back({{"dt", dt}, {"theta1", t1}, {"theta2", t2}, {"gap", gap}});
      }
    };
    for (const double dt : c.feller.dt_ladder) {
      auto scheme = c.feller.scheme;
      scheme.dt = dt;
      run_rung(dt, feller::simulate_feller_ensemble(c.params, c.initial_feller, scheme,
                                                    c.feller.T, c.n_reps,
                                                    feller_options(c, {c.feller.T})));
    }
    run_rung(c.feller.scheme.dt, ens);
    r.statistics["mgf_ladder"] = lstats;
    r.tables.push_back(std::move(ladder));
  }

  double min_p = std::numeric_limits<double>::infinity(), min_q = min_p;
  for (const auto& s : ens.paths) {
    min_p = std::min(min_p, s.min_p);
    min_q = std::min(min_q, s.min_q);
  }
  r.verdicts.push_back({"nonnegativity", "Prop 3.1 on/off Feller diffusion",
                        min_p >= 0.0 && min_q >= 0.0, std::min(min_p, min_q), 0.0,
                        "minimum over every step of every path"});
  if (c.initial_feller.q > 0.0) {
    const auto ps = feller::persistence_summary(ens, 1e-10);
    r.statistics["persistence"] = {{"bound_violations", ps.bound_violations},
                                   {"zero_r_paths", ps.zero_r_paths},
                                   {"worst_margin", ps.worst_margin}};
    r.verdicts.push_back({"seed-bank lower bound", "Cor 3.2 long-term persistence",
                          ps.bound_violations == 0 && ps.zero_r_paths == 0,
                          static_cast<double>(ps.bound_violations + ps.zero_r_paths), 0.0,
                          "violations of q_t >= q0 e^{-c~ t} - 1e-10 or r_t = 0"});
  }

  CsvTable paths{"paths", {"path_id", "t", "p", "q", "r"}, {}};
  const std::size_t n_dump = std::min(c.feller.dump_paths, ens.n_paths);
  for (std::size_t i = 0; i < n_dump; ++i) {
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      const double p = ens.p_at(k)[i], q = ens.q_at(k)[i];
      paths.rows.push_back({fmt(i), fmt(ens.times[k]), fmt(p), fmt(q), fmt(p + q)});
    }
  }
  r.tables.push_back(std::move(paths));
  r.statistics["scheme"] = {{"dt", c.feller.scheme.dt},
                            {"variant", feller::to_string(c.feller.scheme.variant)},
                            {"p_floor", c.feller.scheme.p_floor}};
}

// ------------------------------------------------------------------ solve-dual

CsvTable field_table(const dual::DualField& f, const std::string& name) {
  CsvTable t{name, {"x", "V_active", "V_dormant", "t"}, {}};
  for (std::size_t j = 0; j < f.grid.size(); ++j) {
    t.rows.push_back({fmt(f.grid.x(j)), fmt(f.active[j]), fmt(f.dormant[j]), fmt(f.time)});
  }
  return t;
}

void run_solve_dual(const ExperimentConfig& c, RunResult& r) {
  const auto& phi = c.test_function;
  const auto res = dual::solve_spatial_dual_pde(c.params, phi, c.dual.T, c.dual.variant, c.dual.pde);
  r.tables.push_back(field_table(res.field, "field"));
  r.statistics["pde"] = {{"variant", dual::to_string(c.dual.variant)},
                         {"T", c.dual.T},
                         {"dx_ladder", {c.dual.pde.dx, 0.5 * c.dual.pde.dx}},
                         {"refinement_gap", num(res.refinement_gap)},
                         {"richardson_error_estimate", num(res.error_estimate)},
                         {"steps", res.steps},
                         {"dt", res.dt},
                         {"boundary_deviation", res.boundary_deviation},
                         {"sup_norm", res.field.sup_norm()},
                         {"min_value", res.field.min_value()}};
  r.verdicts.push_back({"finite field", "Thm 1.2 dual system", res.field.finite(), 0.0, 0.0, ""});
  r.verdicts.push_back({"positivity", "Thm 1.2 Laplace functional", res.field.min_value() >= -1e-12,
                        res.field.min_value(), -1e-12, "minimum nodal value"});
  const double bound = c.dual.variant == dual::DualVariant::bbm ? 1.0 : phi.sup_bound();
  r.verdicts.push_back({"sup bound", "Prop 2.12 boundedness", res.field.sup_norm() <= bound + 1e-12,
                        res.field.sup_norm(), bound,
                        c.dual.variant == dual::DualVariant::bbm ? "u in [0,1]" : "V <= ||phi||"});

  if (c.dual.picard.enabled) {
    if (c.dual.variant == dual::DualVariant::bbm) {
      throw ConfigInvalid("dual.picard", "the Picard construction applies to the sbm and eps duals");
    }
    const int n = c.dual.picard.n_intervals;
    const double T = c.dual.picard.T > 0.0 ? c.dual.picard.T
                                           : dual::max_glue_horizon(c.params, phi.sup_bound(), n);
    dual::PdeOptions opts = c.dual.pde;
    opts.grid = dual::auto_grid(phi, std::max(T, c.dual.T), opts.dx, opts.margin_factor);
    opts.richardson = false;
    const auto init = dual::initial_dual_data(phi, *opts.grid, c.dual.variant, opts.epsilon);
    dual::PicardOptions popts = c.dual.picard.options;
    popts.fk_seed = c.seed;
    const auto glued = dual::glue_intervals(c.params, init, phi.sup_bound(), T, n, popts);
    const auto mol = dual::evolve_dual(c.params, init, T, c.dual.variant, opts);
    const double gap = dual::sup_difference(glued.field, mol);
    CsvTable stages{"picard", {"interval", "iterations", "max_ratio", "max_abs"}, {}};
    json sj = json::array();
    double max_ratio = 0.0;
    for (std::size_t k = 0; k < glued.stages.size(); ++k) {
      const auto& s = glued.stages[k];
      max_ratio = std::max(max_ratio, s.max_ratio);
      stages.rows.push_back({fmt(k), fmt(s.iterations), fmt(s.max_ratio), fmt(s.max_abs)});
      json ratios = json::array();
      for (double x : s.contraction_ratios) ratios.push_back(x);
      sj.push_back({{"iterations", s.iterations}, {"contraction_ratios", ratios},
                    {"max_abs", s.max_abs}});
    }
    r.tables.push_back(std::move(stages));
    r.tables.push_back(field_table(glued.field, "picard_field"));
    r.statistics["picard"] = {{"inner", dual::to_string(popts.inner)},
                              {"T", T},
                              {"n_intervals", n},
                              {"A", glued.A},
                              {"C_A", glued.C_A},
                              {"interval_length", glued.interval_length},
                              {"stages", sj},
                              {"sup_gap_vs_mol", gap}};
    const double gap_tol = popts.inner == dual::InnerExpectation::pde ? 1e-3 : 5e-2;
    r.verdicts.push_back({"Picard contraction ratio", "Lemma 2.8 Lipschitz continuity trick",
                          max_ratio <= 0.55, max_ratio, 0.55, "max over all sweeps"});
    r.verdicts.push_back({"glued Picard vs method of lines", "Appendix A localization lemma",
                          gap <= gap_tol, gap, gap_tol, "sup-norm over the grid"});
    r.verdicts.push_back({"A-ball bound", "Prop 2.12 boundedness", glued.max_abs <= glued.A,
                          glued.max_abs, glued.A, "2^n ||phi||"});
  }
}

// -------------------------------------------------------------- verify-duality

void run_verify_duality(const ExperimentConfig& c, RunResult& r) {
  const auto& phi = c.test_function;
  const auto& mu = c.initial_measure;
  const double eps = c.bbm.epsilon;
  const double t = c.bbm.t;
  const auto mc = bbm::laplace_functional_mc(mu, phi, t, eps, c.n_reps, c.params, mc_options(c));

  double dual_value = 1.0;
  double pde_error = 0.0;
  std::string dual_kind;
  if (phi.is_zero()) {
    dual_kind = "zero";
  } else if (c.bbm.poisson_start) {
    dual::PdeOptions opts = c.dual.pde;
    opts.epsilon = eps;
    const auto res = dual::solve_spatial_dual_pde(c.params, phi, t, dual::DualVariant::eps, opts);
    dual_value = std::exp(-dual::pair_with_field(mu, res.field));
    pde_error = std::isfinite(res.error_estimate) ? res.error_estimate : 0.0;
    dual_kind = "eps-dual";
  } else {
    // Fixed start: product over particles of the bbm dual for rate gamma/eps and eps phi.
    ModelParams scaled = c.params;
    scaled.gamma = c.params.gamma / eps;
    dual::PdeOptions opts = c.dual.pde;
    const auto res = dual::solve_spatial_dual_pde(scaled, phi.scaled(eps), t,
                                                  dual::DualVariant::bbm, opts);
    double log_sum = 0.0;
    for (const Atom& a : mu.atoms()) {
      const double n = std::round(a.weight / eps);
      log_sum += n * std::log(res.field.interpolate(a.position.front(), a.state));
    }
    dual_value = std::exp(log_sum);
    pde_error = std::isfinite(res.error_estimate) ? res.error_estimate : 0.0;
    dual_kind = "bbm-dual";
  }
  const double gap = std::abs(mc.estimate - dual_value);
  const double tol = std::max(3.0 * mc.std_error, c.dual.duality_rel_tol * dual_value);
  r.tables.push_back({"duality",
                      {"t", "epsilon", "mc", "stderr", "dual", "gap", "pde_error"},
                      {{fmt(t), fmt(eps), fmt(mc.estimate), fmt(mc.std_error), fmt(dual_value),
                        fmt(gap), fmt(pde_error)}}});
  r.statistics["duality"] = {{"dual", dual_kind},     {"mc", mc.estimate},
                             {"stderr", mc.std_error}, {"dual_value", dual_value},
                             {"gap", gap},             {"pde_error_estimate", pde_error},
                             {"n_reps", mc.n_reps}};
  r.verdicts.push_back({"Laplace duality at fixed epsilon",
                        "Prop 2.18 Laplace transform of scaled empirical measure", gap <= tol, gap,
                        tol, "mc " + fmt(mc.estimate) + " vs " + dual_kind + " " + fmt(dual_value)});
}

// ----------------------------------------------------------------- eps-cascade

void run_eps_cascade(const ExperimentConfig& c, RunResult& r) {
  const auto& phi = c.test_function;
  const auto table = dual::eps_cascade(c.params, phi, c.cascade.t, c.cascade.eps_list,
                                       c.initial_measure, c.dual.pde);
  CsvTable csv{"cascade",
               {"epsilon", "pairing", "sup_gap", "initial_gap", "gap_over_eps", "error_estimate"},
               {}};
  json rows = json::array();
  bool decreasing = true;
  bool all_zero = true;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    all_zero = all_zero && row.sup_gap == 0.0;
    if (k > 0 && !(row.sup_gap < table.rows[k - 1].sup_gap)) decreasing = false;
    csv.rows.push_back({fmt(row.epsilon), fmt(row.pairing), fmt(row.sup_gap),
                        fmt(row.initial_gap), fmt(row.sup_gap / row.epsilon),
                        fmt(row.error_estimate)});
    rows.push_back({{"epsilon", row.epsilon}, {"pairing", row.pairing},
                    {"sup_gap", row.sup_gap}, {"initial_gap", row.initial_gap},
                    {"error_estimate", num(row.error_estimate)}});
  }
  r.tables.push_back(std::move(csv));
  r.statistics["cascade"] = {{"t", table.t},
                             {"limit_pairing", table.limit_pairing},
                             {"limit_error_estimate", num(table.limit_error_estimate)},
                             {"rows", rows}};
  r.verdicts.push_back({"gaps strictly decreasing (observational)",
                        "Cor 2.16 uniform convergence", decreasing || all_zero, 0.0, 0.0,
                        all_zero ? "all gaps are zero" : ""});
  const double last_gap = table.rows.empty() ? 0.0 : table.rows.back().sup_gap;
  const double tol = c.cascade.gap_fraction * phi.sup_bound();
  r.verdicts.push_back({"gap at smallest epsilon", "Cor 2.16 uniform convergence",
                        last_gap < tol || last_gap == 0.0, last_gap, tol,
                        "sup-norm gap vs fraction of ||phi||"});
}

// ------------------------------------------------------------ extinction-stats

void add_hit_table(CsvTable& t, double y, const feller::HitStats& h) {
  t.rows.push_back({fmt(y), fmt(h.hits), fmt(h.n), fmt(h.fraction), fmt(h.wilson.lower),
                    fmt(h.wilson.upper)});
}

void run_extinction_stats(const ExperimentConfig& c, RunResult& r) {
  const auto ens = feller::simulate_feller_ensemble(c.params, c.initial_feller, c.feller.scheme,
                                                    c.feller.T, c.n_reps, feller_options(c, {}));
  const auto h = feller::hit_zero_stats(ens, c.feller.scheme.p_floor);
  const auto h_floor = feller::hit_zero_stats(ens, std::max(1e-3, c.feller.scheme.p_floor));
  const auto cert = analytics::boundary_certificate(c.params, c.initial_feller.q);
  CsvTable t{"hits", {"q0", "hits", "n", "fraction", "wilson_lower", "wilson_upper"}, {}};
  add_hit_table(t, c.initial_feller.q, h);
  r.tables.push_back(std::move(t));
  r.statistics["hits"] = {{"hits", h.hits},
                          {"n", h.n},
                          {"fraction", h.fraction},
                          {"wilson_lower", h.wilson.lower},
                          {"wilson_upper", h.wilson.upper},
                          {"p_floor", c.feller.scheme.p_floor},
                          {"fraction_at_floor_1e-3", h_floor.fraction},
                          {"certificate_pass", cert.pass}};
  r.verdicts.push_back({"active mass hits zero with positive probability",
                        "Prop 3.8 / Cor 3.9 active component hitting zero", h.wilson.lower > 0.0,
                        h.wilson.lower, 0.0, "Wilson 95% lower bound on the hit fraction"});
  if (c.feller.expect_survivors) {
    r.verdicts.push_back({"some paths avoid zero", "Prop 3.8 (positive, not certain, probability)",
                          h.wilson.upper < 1.0, h.wilson.upper, 1.0,
                          "Wilson 95% upper bound on the hit fraction"});
  }
}

// ----------------------------------------------------------------- decay-study

void run_decay_study(const ExperimentConfig& c, RunResult& r) {
  const auto& cp = c.decay.checkpoints;
  const auto ens = feller::simulate_feller_ensemble(c.params, c.initial_feller, c.feller.scheme,
                                                    cp.back(), c.n_reps, feller_options(c, cp));
  std::vector<std::vector<double>> rs;
  for (std::size_t k = 0; k < ens.times.size(); ++k) rs.push_back(ens.r_at(k));
  const auto order = nonincreasing_within(rs);
  CsvTable rt{"r_decay", {"t", "mean_r", "se_r", "median_r", "increment", "increment_se"}, {}};
  json rj = json::array();
  bool median_decreasing = true;
  double prev_median = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const auto s = summarize(rs[k]);
    const double med = median(rs[k]);
    if (!(med < prev_median)) median_decreasing = false;
    prev_median = med;
    const double inc = k > 0 ? order.increments[k - 1] : 0.0;
    const double inc_se = k > 0 ? order.increment_std_errors[k - 1] : 0.0;
    rt.rows.push_back({fmt(ens.times[k]), fmt(s.mean), fmt(s.std_error), fmt(med), fmt(inc),
                       fmt(inc_se)});
    rj.push_back({{"t", ens.times[k]}, {"r", summary_json(s)}, {"median", med}});
  }
  r.tables.push_back(std::move(rt));
  r.statistics["r_decay"] = {{"checkpoints", rj}, {"worst_z", num(order.worst_z)},
                             {"median_strictly_decreasing", median_decreasing}};
  r.verdicts.push_back({"mean r_t decreasing across checkpoints (3 sigma)",
                        "Prop 3.5 almost-sure decay", order.pass, order.worst_z, 3.0,
                        "largest increment in units of its paired standard error"});
  r.verdicts.push_back({"median r_t strictly decreasing (diagnostic)",
                        "Prop 3.5 almost-sure decay", median_decreasing, 0.0, 0.0, ""});

  const auto& wc = c.decay.w_checkpoints;
  const auto wens = feller::simulate_feller_ensemble(c.params, c.initial_feller, c.feller.scheme,
                                                     std::max(wc.back(), c.feller.scheme.dt),
                                                     c.decay.w_reps, feller_options(c, wc, 1));
  CsvTable wt{"w_decay", {"j", "t", "mean_W", "se_W", "expected_W"}, {}};
  json wj = json::array();
  for (int j : c.decay.columns) {
    const auto rep = analytics::w_decay_report(wens, c.decay.lambda, j);
    json pts = json::array();
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      wt.rows.push_back({std::to_string(j), fmt(rep.times[k]), fmt(rep.W[k].mean),
                         fmt(rep.W[k].std_error), fmt(rep.expected[k])});
      pts.push_back({{"t", rep.times[k]}, {"W", summary_json(rep.W[k])},
                     {"expected", rep.expected[k]}});
    }
    wj.push_back({{"j", j}, {"lambda", rep.lambda}, {"points", pts},
                  {"worst_z", num(rep.ordering.worst_z)}});
    r.verdicts.push_back({"W supermartingale j=" + std::to_string(j) + " (3 sigma)",
                          "Prop 3.5 supermartingale W", rep.ordering.pass, rep.ordering.worst_z,
                          3.0, "largest increment of mean W in units of its paired standard error"});
  }
  r.tables.push_back(std::move(wt));
  r.statistics["w_decay"] = wj;
}

// ----------------------------------------------------------------- certificate

void run_certificate(const ExperimentConfig& c, RunResult& r) {
  CsvTable t{"certificate",
             {"y", "verdict", "threshold", "generator_p1", "classification_strict", "hits", "n",
              "fraction", "wilson_lower", "wilson_upper"},
             {}};
  json cj = json::array();
  for (std::size_t k = 0; k < c.certificate.y_values.size(); ++k) {
    const double y = c.certificate.y_values[k];
    const auto cert = analytics::boundary_certificate(c.params, y);
    const auto ens = feller::simulate_feller_ensemble(
        c.params, {c.certificate.p0, y}, c.feller.scheme, c.certificate.T, c.n_reps,
        feller_options(c, {}, k));
    const auto h = feller::hit_zero_stats(ens, c.feller.scheme.p_floor);
    t.rows.push_back({fmt(y), cert.pass ? "pass" : "fail", fmt(cert.threshold),
                      fmt(cert.generator_p1), cert.classification_strict ? "1" : "0",
                      fmt(h.hits), fmt(h.n), fmt(h.fraction), fmt(h.wilson.lower),
                      fmt(h.wilson.upper)});
    cj.push_back({{"y", y},
                  {"pass", cert.pass},
                  {"drift_inward", cert.drift_inward},
                  {"speed_bound", cert.speed_bound},
                  {"threshold", cert.threshold},
                  {"h", {cert.h[0], cert.h[1]}},
                  {"classification_strict", cert.classification_strict},
                  {"classification_threshold", cert.classification_threshold},
                  {"hit_fraction", h.fraction},
                  {"wilson_lower", h.wilson.lower},
                  {"wilson_upper", h.wilson.upper}});
    if (cert.pass) {
      r.verdicts.push_back({"certified y=" + fmt(y) + " hits zero",
                            "Prop 3.8 / Appendix B polynomial boundary classification",
                            h.wilson.lower > 0.0, h.wilson.lower, 0.0,
                            "Wilson 95% lower bound on the hit fraction"});
    }
  }
  r.tables.push_back(std::move(t));
  r.statistics["certificates"] = cj;
  r.statistics["note"] = analytics::boundary_certificate(c.params, 0.0).note;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  RunResult r;
  switch (config.experiment) {
    case Experiment::simulate_bbm:
      run_simulate_bbm(config, r);
      break;
    case Experiment::simulate_feller:
      run_simulate_feller(config, r);
      break;
    case Experiment::solve_dual:
      run_solve_dual(config, r);
      break;
    case Experiment::verify_duality:
      run_verify_duality(config, r);
      break;
    case Experiment::eps_cascade:
      run_eps_cascade(config, r);
      break;
    case Experiment::extinction_stats:
      run_extinction_stats(config, r);
      break;
    case Experiment::decay_study:
      run_decay_study(config, r);
      break;
    case Experiment::certificate:
      run_certificate(config, r);
      break;
  }
  return r;
}

}  // namespace onoff::cli
