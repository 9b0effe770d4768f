#include "app/csv.hpp"

#include "freqlab/types.hpp"

#include <cmath>
#include <cstdio>

namespace freqlab::app {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) fail(ErrorKind::Config, "cli", "csv", "cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) fail(ErrorKind::Numeric, "cli", "csv", "row width does not match the header of " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    if (const double* d = std::get_if<double>(&cells[i])) out_ << format_number(*d);
    else if (const long long* n = std::get_if<long long>(&cells[i])) out_ << *n;
    else out_ << std::get<std::string>(cells[i]);
  }
  out_ << "\n";
  out_.flush();
}

}  // namespace freqlab::app
