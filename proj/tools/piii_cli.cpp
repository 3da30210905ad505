#include <iostream>

#include "piii/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return piii::cli::run(args, std::cout, std::cerr);
}
