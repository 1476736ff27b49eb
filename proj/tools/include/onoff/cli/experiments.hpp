#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "onoff/cli/config.hpp"

namespace onoff::cli {

/// One pass/fail check with the anchor it verifies and the tolerance used.
struct Verdict {
  std::string name;
  std::string anchor;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Plot-ready table; cells are already formatted.
struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunResult {
  std::vector<Verdict> verdicts;
  nlohmann::ordered_json statistics = nlohmann::ordered_json::object();
  std::vector<CsvTable> tables;

  bool all_pass() const;
};

/// Locale-free shortest round-trip formatting.
std::string format_number(double v);

RunResult run_experiment(const ExperimentConfig& config);

}  // namespace onoff::cli
