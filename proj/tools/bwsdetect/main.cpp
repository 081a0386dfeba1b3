#include <iostream>
#include <string>
#include <vector>

#include "bws/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bws::cli::run_cli(args, std::cout, std::cerr);
}
