#include <iostream>
#include <string>
#include <vector>

#include "blocksketch/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return blocksketch::RunCli(args, std::cout, std::cerr);
}
