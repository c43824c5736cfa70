// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "loadfc/cli.hpp"

int main(int argc, char** argv) {
  return loadfc::run_cli(argc, argv, std::cout, std::cerr);
}
