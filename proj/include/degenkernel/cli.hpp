// SPDX-License-Identifier: MIT
/**
 * @file cli.hpp
 * @brief Command-line front end. Exit codes: 0 success, 1 usage error,
 * 2 domain or validation error, 3 numeric non-convergence.
 */
#pragma once

#include <ostream>

namespace degenkernel {

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace degenkernel
