// SPDX-License-Identifier: MIT
#include <iostream>

#include "degenkernel/cli.hpp"

int main(int argc, char** argv) { return degenkernel::run_cli(argc, argv, std::cout, std::cerr); }
