#include <iostream>
#include <string>
#include <vector>

#include "psoed/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psoed::run_cli(args, std::cout, std::cerr);
}
