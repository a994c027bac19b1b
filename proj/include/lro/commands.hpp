#pragma once

// Subcommand pipelines. Each writes its artifacts plus config.json, VERSION
// and run.json into cfg.out.

#include <string>
#include <vector>

#include <json.hpp>

#include "lro/config.hpp"

namespace lro {

struct CommandResult {
  std::vector<std::string> outputs;  // artifact file names, relative to cfg.out
  nlohmann::json summary;
  int exit_code = 0;
};

CommandResult cmd_spectrum(const RunConfig& cfg);
CommandResult cmd_ncrit_map(const RunConfig& cfg);
CommandResult cmd_readout(const RunConfig& cfg);
CommandResult cmd_classical(const RunConfig& cfg);
CommandResult cmd_sw_report(const RunConfig& cfg);

/// Dispatches on the subcommand name ("spectrum", "ncrit-map", ...).
CommandResult run_command(const std::string& name, const RunConfig& cfg);

const std::vector<std::string>& command_names();

}  // namespace lro
