#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "confvisc_cli/config.hpp"

namespace confvisc::cli {

struct CommandContext {
  int n = 3;
  OperatorSpec spec;
  ScalarField field;
  std::uint64_t seed = 1;
  bool plot = false;
  std::function<void(const std::string&)> log;
};

struct CommandOutput {
  bool pass = false;
  json result;
  std::string csv;
  std::string svg;  // empty unless plotting was requested
  /// Further artifacts as (file name, content).
  std::vector<std::pair<std::string, std::string>> files;
};

using Command = std::function<CommandOutput(const CommandContext&, Section&)>;

/// Command names in a fixed order.
const std::vector<std::string>& command_names();
/// The handler for `name`; throws ConfigError for unknown names.
Command find_command(const std::string& name);

}  // namespace confvisc::cli
