// SPDX-License-Identifier: MIT
/**
 * @file parallel.hpp
 * @brief Thread-count control. DEGENKERNEL_THREADS caps OpenMP parallelism.
 */
#pragma once

namespace degenkernel {

/// Thread count honoring DEGENKERNEL_THREADS (positive integer), else the
/// OpenMP default.
int configured_threads();

/// Applies configured_threads() to the OpenMP runtime. Idempotent.
void apply_thread_limit();

}  // namespace degenkernel
