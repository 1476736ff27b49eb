#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "onoff/cli/config.hpp"
#include "onoff/cli/experiments.hpp"

namespace onoff::cli {

/// Full configuration echo. `include_runtime` adds workers and out, which
/// do not affect results and are left out of the hash.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config, bool include_runtime);

/// FNV-1a 64 of the canonical configuration (hex, 16 digits).
std::string config_hash(const ExperimentConfig& config);

/// "<experiment>-seed<seed>-<hash>".
std::string file_stem(const ExperimentConfig& config);

nlohmann::ordered_json summary_json(const ExperimentConfig& config, const RunResult& result);

struct EmittedFiles {
  std::string summary;
  std::string manifest;
  std::vector<std::string> tables;
};

/// Writes <stem>-summary.json, <stem>-manifest.json and <stem>-<table>.csv
/// into out_dir (created if needed). Throws IoError.
EmittedFiles emit_report(const ExperimentConfig& config, const RunResult& result,
                         double wall_seconds, const std::string& out_dir);

std::string to_csv(const CsvTable& table);

}  // namespace onoff::cli
