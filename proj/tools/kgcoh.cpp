#include <iostream>
#include <string>
#include <vector>

#include "kgcoh/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kgcoh::cli::run(args, std::cout, std::cerr);
}
