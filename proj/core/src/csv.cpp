#include "oqsim/csv.hpp"

#include <cstdio>
#include <fstream>

namespace oqsim {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw IoError(path + ": row " + std::to_string(r) + " has " +
                    std::to_string(rows[r].size()) + " cells for " +
                    std::to_string(header.size()) + " columns");
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) out << ',';
      out << format_number(rows[r][i]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace oqsim
