#include <iostream>
#include <string>
#include <vector>

#include "prs/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return prs::cli::run(args, std::cout, std::cerr);
}
