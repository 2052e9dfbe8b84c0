#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbd/cli/config.hpp"
#include "vbd/cli/output.hpp"

namespace vbd::cli {

struct RunContext {
  ScenarioConfig config = default_config();
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct CommandResult {
  std::vector<OutputFile> files;
  std::vector<std::string> summary;  // human-readable lines for stdout
};

/// Verbs accepted by run_command, in help order.
const std::vector<std::string>& command_names();

/// Runs one experiment entirely in memory. Throws ConfigError for unusable
/// settings and vbd::Error for numerical failures.
CommandResult run_command(const std::string& name, const RunContext& ctx);

CommandResult cmd_reference(const RunContext& ctx);
CommandResult cmd_simulate_uhr(const RunContext& ctx);
CommandResult cmd_simulate_full(const RunContext& ctx);
CommandResult cmd_sweep_a13(const RunContext& ctx);
CommandResult cmd_sweep_a24(const RunContext& ctx);
CommandResult cmd_sweep_ystar(const RunContext& ctx);
CommandResult cmd_threshold(const RunContext& ctx);
CommandResult cmd_characteristics(const RunContext& ctx);
CommandResult cmd_sample_params(const RunContext& ctx);

/// Every resolved parameter, in a fixed key order.
nlohmann::ordered_json parameters_json(const RunContext& ctx);

}  // namespace vbd::cli
