#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "onoff/cli/config.hpp"
#include "onoff/cli/experiments.hpp"
#include "onoff/cli/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerdictFailed = 1;
constexpr int kExitError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace onoff::cli;
  CLI::App app{"onoff-lab: simulation and verification runs for on/off super-Brownian motion"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> experiment;
  app.add_option("--config", config_path, "YAML experiment configuration")->required();
  app.add_option("--seed", seed, "master seed (overrides the file)");
  app.add_option("--workers", workers, "worker threads, 0 = all cores (overrides the file)");
  app.add_option("--out", out, "output directory (overrides the file)");
  app.add_option("--experiment", experiment, "experiment id (overrides the file)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (out) config.out = *out;
    if (experiment) {
      const auto id = parse_experiment(*experiment);
      if (!id) throw ConfigInvalid("experiment", "unknown experiment id '" + *experiment + "'");
      config.experiment = *id;
    }
    validate(config);

    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run_experiment(config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const EmittedFiles files = emit_report(config, result, wall, config.out);

    for (const Verdict& v : result.verdicts) {
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " [" << v.anchor
                << "] value=" << format_number(v.value) << " tol=" << format_number(v.tolerance)
                << '\n';
    }
    std::cout << "summary: " << files.summary << '\n';
    return result.all_pass() ? kExitPass : kExitVerdictFailed;
  } catch (const ConfigInvalid& e) {
    std::cerr << "ConfigInvalid: " << e.what() << '\n';
    return kExitError;
  } catch (const onoff::Error& e) {
    std::cerr << "ModuleError (" << e.kind() << "): " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
