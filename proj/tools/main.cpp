#include <iostream>
#include <string>
#include <vector>

#include "earlystop/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return earlystop::run_command(args, std::cout, std::cerr);
}
