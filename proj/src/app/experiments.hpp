#pragma once

#include "app/config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace freqlab::app {

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct Summary {
  std::string experiment;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  bool passed() const;
};

// Creates out.dir and probes that it is writable before any computation.
void prepare_output(const std::string& dir);

// Runs cfg's experiment, writing CSV (and SVG when out.plot) into out.dir.
Summary run_experiment(const Config& cfg);

void print_summary(const Summary& s, std::ostream& os);

}  // namespace freqlab::app
