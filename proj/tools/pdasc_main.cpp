#include <iostream>
#include <string>
#include <vector>

#include "pdasc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pdasc::run_cli(args, std::cout, std::cerr);
}
