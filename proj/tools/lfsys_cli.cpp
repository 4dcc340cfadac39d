#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "lfsys/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Left-invariant L-F systems: scenario runner"};
  lfsys::cli::RunRequest req;
  int threads = 0;
  app.add_option("command", req.command, "Command (overrides the scenario's)")
      ->check(CLI::IsMember([] {
        auto c = lfsys::cli::kCommands;
        c.push_back("euler-classify");
        return c;
      }()));
  app.add_option("--scenario,-s", req.scenario_path, "Scenario file")->required();
  app.add_option("--out,-o", req.out_dir, "Output directory (default $LFSYS_OUT_DIR or ./lfsys-out)");
  app.add_option("--threads,-j", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol-override", req.tol_overrides, "Tolerance override key=value (repeatable)")
      ->expected(1)
      ->take_all();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lfsys::cli::kExitValidation;
  }
  if (req.command == "euler-classify") req.command = "classify";
  if (threads > 0) req.threads = threads;
  if (req.out_dir.empty()) {
    const char* env = std::getenv("LFSYS_OUT_DIR");
    req.out_dir = env && *env ? env : "lfsys-out";
  }
  const auto result = lfsys::cli::run(req, std::cerr);
  if (result.exit_code == 0) {
    for (const auto& f : result.files) std::cout << req.out_dir << '/' << f << '\n';
  }
  return result.exit_code;
}
