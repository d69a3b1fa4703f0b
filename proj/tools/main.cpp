#include <iostream>
#include <string>
#include <vector>

#include "netdyn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return netdyn::run_cli(args, std::cout, std::cerr);
}
