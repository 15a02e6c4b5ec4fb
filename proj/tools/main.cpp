#include <iostream>
#include <string>
#include <vector>

#include "coimpact/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return coimpact::run(args, std::cout, std::cerr);
}
