#include "onoff/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "onoff/error.hpp"

namespace onoff::cli {

using json = nlohmann::ordered_json;

namespace {

json test_function_json(const TestFunction& phi) {
  json j = {{"kind", to_string(phi.kind())},
            {"active", phi.height(State::active)},
            {"dormant", phi.height(State::dormant)}};
  if (!phi.is_spatially_constant()) {
    j["center"] = phi.center();
    j["width"] = phi.width();
  }
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

json config_to_json(const ExperimentConfig& c, bool include_runtime) {
  json atoms = json::array();
  for (const Atom& a : c.initial_measure.atoms()) {
    atoms.push_back({{"position", a.position}, {"state", to_string(a.state)}, {"weight", a.weight}});
  }
  json thetas = json::array();
  for (const auto& [a, b] : c.feller.thetas) thetas.push_back({a, b});
  json j = {
      {"experiment", to_string(c.experiment)},
      {"seed", c.seed},
      {"n_reps", c.n_reps},
      {"params",
       {{"gamma", c.params.gamma}, {"c", c.params.c}, {"c_tilde", c.params.c_tilde},
        {"dim", c.params.dim}}},
      {"initial", {{"atoms", atoms}, {"feller", {{"p", c.initial_feller.p}, {"q", c.initial_feller.q}}}}},
      {"test_function", test_function_json(c.test_function)},
      {"bbm",
       {{"epsilon", c.bbm.epsilon},
        {"t", c.bbm.t},
        {"observation_times", c.bbm.observation_times},
        {"population_cap", c.bbm.population_cap},
        {"record_particles", c.bbm.record_particles},
        {"poisson_start", c.bbm.poisson_start},
        {"martingale_steps", c.bbm.martingale_steps}}},
      {"feller",
       {{"T", c.feller.T},
        {"dt", c.feller.scheme.dt},
        {"variant", feller::to_string(c.feller.scheme.variant)},
        {"p_floor", c.feller.scheme.p_floor},
        {"observation_times", c.feller.observation_times},
        {"thetas", thetas},
        {"stop_on_hit", c.feller.stop_on_hit},
        {"expect_survivors", c.feller.expect_survivors},
        {"mgf_abs_tol", c.feller.mgf_abs_tol},
        {"dump_paths", c.feller.dump_paths},
        {"dt_ladder", c.feller.dt_ladder}}},
      {"dual",
       {{"variant", dual::to_string(c.dual.variant)},
        {"T", c.dual.T},
        {"dx", c.dual.pde.dx},
        {"dt", c.dual.pde.dt},
        {"cfl", c.dual.pde.cfl},
        {"epsilon", c.dual.pde.epsilon},
        {"bbm_reaction", c.dual.pde.bbm_reaction == dual::BbmReaction::particle_consistent
                             ? "particle-consistent"
                             : "half-rate"},
        {"richardson", c.dual.pde.richardson},
        {"margin_factor", c.dual.pde.margin_factor},
        {"duality_rel_tol", c.dual.duality_rel_tol},
        {"picard",
         {{"enabled", c.dual.picard.enabled},
          {"n_intervals", c.dual.picard.n_intervals},
          {"T", c.dual.picard.T},
          {"inner", dual::to_string(c.dual.picard.options.inner)},
          {"substeps", c.dual.picard.options.substeps},
          {"tol", c.dual.picard.options.tol},
          {"max_iterations", c.dual.picard.options.max_iterations},
          {"fk_paths", c.dual.picard.options.fk_paths}}}}},
      {"cascade",
       {{"t", c.cascade.t}, {"eps_list", c.cascade.eps_list}, {"gap_fraction", c.cascade.gap_fraction}}},
      {"decay",
       {{"checkpoints", c.decay.checkpoints},
        {"lambda", c.decay.lambda},
        {"columns", c.decay.columns},
        {"w_checkpoints", c.decay.w_checkpoints},
        {"w_reps", c.decay.w_reps}}},
      {"certificate",
       {{"y_values", c.certificate.y_values}, {"p0", c.certificate.p0}, {"T", c.certificate.T}}},
  };
  if (include_runtime) {
    j["workers"] = c.workers;
    j["out"] = c.out;
  }
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string canon = config_to_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_stem(const ExperimentConfig& config) {
  return std::string(to_string(config.experiment)) + "-seed" + std::to_string(config.seed) + "-" +
         config_hash(config);
}

json summary_json(const ExperimentConfig& config, const RunResult& result) {
  json verdicts = json::array();
  for (const Verdict& v : result.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"anchor", v.anchor},
                        {"pass", v.pass},
                        {"value", std::isfinite(v.value) ? json(v.value) : json(format_number(v.value))},
                        {"tolerance", v.tolerance},
                        {"detail", v.detail}});
  }
  return {{"experiment", to_string(config.experiment)},
          {"seed", config.seed},
          {"config_hash", config_hash(config)},
          {"all_pass", result.all_pass()},
          {"verdicts", verdicts},
          {"statistics", result.statistics}};
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

EmittedFiles emit_report(const ExperimentConfig& config, const RunResult& result,
                         double wall_seconds, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const std::string stem = file_stem(config);
  EmittedFiles files;

  files.summary = (fs::path(out_dir) / (stem + "-summary.json")).string();
  write_file(files.summary, summary_json(config, result).dump(2) + "\n");

  json tables = json::array();
  for (const CsvTable& t : result.tables) {
    const std::string path = (fs::path(out_dir) / (stem + "-" + t.name + ".csv")).string();
    write_file(path, to_csv(t));
    files.tables.push_back(path);
    tables.push_back({{"name", t.name}, {"file", fs::path(path).filename().string()},
                      {"columns", t.header}, {"rows", t.rows.size()}});
  }

  const json manifest = {
      {"experiment", to_string(config.experiment)},
      {"config", config_to_json(config, true)},
      {"config_hash", config_hash(config)},
      {"seeds", {{"master_seed", config.seed}, {"rng", "Philox4x32-10, stream per replicate"}}},
      {"versions",
       {{"onoff", ONOFF_VERSION},
        {"compiler", __VERSION__},
        {"cxx_standard", static_cast<long>(__cplusplus)}}},
      {"wall_time_seconds", wall_seconds},
      {"summary", fs::path(files.summary).filename().string()},
      {"tables", tables},
  };
  files.manifest = (fs::path(out_dir) / (stem + "-manifest.json")).string();
  write_file(files.manifest, manifest.dump(2) + "\n");
  return files;
}

}  // namespace onoff::cli
