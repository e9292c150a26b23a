#include <iostream>

#include "skymission_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return skymission::cli::run_cli(args, std::cout, std::cerr);
}
