// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 when any criterion fails.
#include "app/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"freqlab acceptance"};
  freqlab::app::VerifyOptions opt;
  opt.out_dir = "acceptance_out";
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--seed", opt.seed, "seed");
  app.add_option("--criteria", opt.criteria, "criterion numbers (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const auto results = freqlab::app::verify_all(opt, &std::cout);
  const bool failed = std::any_of(results.begin(), results.end(),
                                  [](const freqlab::app::CriterionResult& r) { return r.status != "PASS"; });
  std::cout << (failed ? "ACCEPTANCE FAIL" : "ACCEPTANCE PASS") << "\n";
  return failed ? 1 : 0;
}
