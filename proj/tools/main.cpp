#include <iostream>
#include <string>
#include <vector>

#include "nullgauge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nullgauge::run_cli(args, std::cout, std::cerr);
}
