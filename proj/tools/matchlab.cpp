// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include "matchlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto r = matchlab::run_command(args);
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}
