#pragma once

// CSV emission with round-trip-exact numbers.

#include <stdexcept>
#include <string>
#include <vector>

namespace oqsim {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits: enough to reproduce the double bit-for-bit.
std::string format_number(double v);

// Header line plus numeric rows; every row must match the header width.
// Throws IoError when the file cannot be created or written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace oqsim
