#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace freqlab::app {

struct VerifyOptions {
  std::string out_dir = "verify_out";
  unsigned seed = 1;
  // Replaces the base quadrature tolerance 1e-10; every criterion scales its own tolerance by the same factor.
  std::optional<double> quad_tol;
  // Restricts the fixtures; a criterion left without fixtures reports NOOP.
  std::optional<std::vector<std::string>> fixtures;
  std::vector<int> criteria;  // empty: 1..13
  bool plot = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::string status;  // PASS | FAIL | WARN | NOOP
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // seconds; 0 = none
  std::vector<std::string> info;
};

const std::vector<std::string>& verify_fixture_names();

// Criteria 1..12 write CSVs into out_dir; criterion 13 reruns them into out_dir/run2 and compares bytes.
// Failures are reported, not thrown.
std::vector<CriterionResult> verify_all(const VerifyOptions& options, std::ostream* progress = nullptr);

std::string format_result(const CriterionResult& r);

}  // namespace freqlab::app
