#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace confvisc::cli {

struct RunOptions {
  bool plot = false;
  bool verbose = false;
  /// Relative grid paths in the config resolve against this directory.
  std::filesystem::path base_dir = ".";
};

struct RunResult {
  int exit_code = 2;  // 0 PASS, 1 FAIL, 2 error
  nlohmann::json summary;
  std::string csv;
  std::string svg;
  std::vector<std::pair<std::string, std::string>> files;
};

/// Runs one experiment from config text. Never throws: errors land in the
/// summary with exit code 2 (or 1 for NotASolution).
RunResult run_config(const std::string& config_text, const RunOptions& options);

/// summary.json, diagnostics.csv, plot.svg when present, plus extra files.
void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir);

}  // namespace confvisc::cli
