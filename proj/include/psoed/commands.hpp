#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "psoed/error.hpp"
#include "psoed/run_config.hpp"

namespace psoed {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitIo = 3 };

int exit_code_for(ErrorCode code);

/// Runs one subcommand (render | solve | optimize | pipeline | baseline |
/// evaluate). `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The command bodies, callable without argument parsing. Each writes into
// cfg.output (created if missing) and returns a JSON summary.
nlohmann::json cmd_render(const RunConfig& cfg);
nlohmann::json cmd_solve(const std::filesystem::path& lights_file, const std::vector<std::filesystem::path>& images,
                         const std::filesystem::path& out_dir);
nlohmann::json cmd_optimize(const RunConfig& cfg, bool shape_agnostic, const std::filesystem::path& prior_map = {});
nlohmann::json cmd_pipeline(const RunConfig& cfg);
nlohmann::json cmd_baseline(const RunConfig& cfg, int count, bool shape_agnostic);
nlohmann::json cmd_evaluate(const std::filesystem::path& estimate, const std::filesystem::path& truth,
                            const std::filesystem::path& out_dir);

}  // namespace psoed
