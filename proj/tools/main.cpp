#include <iostream>
#include <vector>

#include "deflab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return deflab::run_cli(args, std::cout, std::cerr);
}
