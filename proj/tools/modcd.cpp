#include <iostream>
#include <string>
#include <vector>

#include "modcd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return modcd::run_cli(args, std::cout, std::cerr);
}
