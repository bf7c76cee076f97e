// SPDX-License-Identifier: MIT
// Acceptance runner for ctest: one PASS/FAIL line per criterion, with wall
// times. Exit status 0 iff every selected criterion passes.
#include <iostream>
#include <string>

#include "degenkernel/acceptance.hpp"
#include "degenkernel/parallel.hpp"

int main(int argc, char** argv) {
  degenkernel::apply_thread_limit();
  degenkernel::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--filter" && i + 1 < argc) {
      opts.filter = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--filter IDS_OR_KEYS]\n";
      return 1;
    }
  }
  const auto results = degenkernel::run_acceptance(opts);
  std::cout << degenkernel::acceptance_text(results, true);
  for (const auto& r : results) {
    if (!r.pass) return 1;
  }
  return results.empty() ? 1 : 0;
}
