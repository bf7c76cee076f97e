// SPDX-License-Identifier: MIT
/**
 * @file format.hpp
 * @brief Lossless number formatting and RFC-4180-style CSV output (LF endings).
 */
#pragma once

#include <string>
#include <vector>

namespace degenkernel {

/// 17 significant digits; parses back to the same double.
std::string fmt17(double v);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

/// Joined, quoted fields terminated by '\n'.
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace degenkernel
