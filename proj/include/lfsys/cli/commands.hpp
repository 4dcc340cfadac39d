#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lfsys/cli/json_out.hpp"
#include "lfsys/cli/scenario.hpp"

namespace lfsys::cli {

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

struct RunRequest {
  std::string scenario_path;
  std::string command;  // empty: the scenario's command
  std::string out_dir;
  std::optional<int> threads;
  std::vector<std::string> tol_overrides;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string error;
  std::vector<std::string> files;  // outputs, manifest last
};

/// Parses the scenario, runs the command and writes the outputs plus
/// manifest.json into the output directory. Never throws for scenario or
/// numerical problems; those map to exit codes 2 and 3.
RunResult run(const RunRequest& req, std::ostream& log);

/// Runs one command of an already parsed scenario. Throws the library errors.
void run_command(const Scenario& sc, OutputDir& out, std::ostream& log);

}  // namespace lfsys::cli
