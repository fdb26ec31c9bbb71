#include <iostream>
#include <string>
#include <vector>

#include "chasemith/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chasemith::run(args, std::cout, std::cerr);
}
