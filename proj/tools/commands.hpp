#pragma once

#include "fsl/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace fsl::cli {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kIoError = 3 };

nlohmann::json cmd_surface(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_dimension(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_certify(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_markov(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_esc(const RunConfig& cfg, const std::string& out_dir);

// Full front end: parses argv, runs the subcommand, writes the report. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsl::cli
