#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace freqlab::app {

using Cell = std::variant<double, long long, std::string>;

// Header row on open; doubles are written with %.17g so reruns are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

std::string format_number(double x);

}  // namespace freqlab::app
