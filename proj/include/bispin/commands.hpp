#ifndef BISPIN_COMMANDS_HPP
#define BISPIN_COMMANDS_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bispin/config.hpp"
#include "bispin/fitting.hpp"

namespace bispin {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitUsage = 2 };

struct CommandOutcome {
  int exit_code = kExitOk;
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative to out_dir, manifest last
  nlohmann::json manifest;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its outputs and "<name>.manifest.json" into
/// run.out. Throws UsageError for bad configuration or input.
CommandOutcome run_command(std::string_view name, const RunConfig& cfg);

CommandOutcome cmd_levels(const RunConfig& cfg);
CommandOutcome cmd_resonances(const RunConfig& cfg);
CommandOutcome cmd_freqmap(const RunConfig& cfg);
CommandOutcome cmd_rabi(const RunConfig& cfg);
CommandOutcome cmd_cce(const RunConfig& cfg);
CommandOutcome cmd_cce_converge(const RunConfig& cfg);
CommandOutcome cmd_fit(const RunConfig& cfg);

nlohmann::json fit_result_json(const FitResult& r);

/// Digest of the physical constants and donor parameters in use.
std::string constants_hash(const SpinSystem& sys);

}  // namespace bispin

#endif  // BISPIN_COMMANDS_HPP
