#include <iostream>
#include <string>
#include <vector>

#include "chainunify/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chainunify::run_cli(args, std::cin, std::cout, std::cerr);
}
