#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdkit/config.hpp"

namespace fdkit::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kDataError = 2 };

// Parses argv and runs one subcommand. Output paths are printed to `out`,
// warnings and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Context {
  RunConfig config;
  std::size_t jobs = 1;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int cmd_detect(Context& ctx);
int cmd_fit(Context& ctx);
int cmd_compare(Context& ctx);
int cmd_calibrate(Context& ctx);
int cmd_simulate(Context& ctx);
int cmd_report(Context& ctx);
int cmd_selftest(Context& ctx);

}  // namespace fdkit::cli
