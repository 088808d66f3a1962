#include <iostream>
#include <string>
#include <vector>

#include "fdkit_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fdkit::cli::run_cli(args, std::cout, std::cerr);
}
