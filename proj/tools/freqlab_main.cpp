#include "app/config.hpp"
#include "app/experiments.hpp"
#include "app/verify.hpp"
#include "freqlab/types.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace freqlab;
using namespace freqlab::app;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Quality:
    case ErrorKind::Precondition: return 3;
    default: return 4;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqlab: frequency functions, critical sets and boundary straightening on graph domains"};
  app.require_subcommand(1);

  std::string target, out_dir;
  bool plot = false;
  std::optional<unsigned> seed;
  std::optional<double> quad_tol, epsilon;
  std::vector<std::string> overrides;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file or by experiment name");
  run->add_option("config", target, "config file, or an experiment name for its built-in defaults")->required();
  run->add_option("--out", out_dir, "output directory (overrides out.dir)");
  run->add_flag("--plot", plot, "write SVG plots");
  run->add_option("--seed", seed, "seed for randomized sampling");
  run->add_option("--quad-tol", quad_tol, "relative quadrature tolerance (overrides quad.tol)");
  run->add_option("--epsilon", epsilon, "epsilon of the Simon fixture (overrides field.epsilon)");
  run->add_option("--set", overrides, "extra key=value overrides")->take_all();

  std::optional<std::string> fixtures;
  std::string criteria;
  std::string verify_out = "verify_out";
  CLI::App* verify = app.add_subcommand("verify-all", "run the acceptance suite; one PASS/FAIL/WARN/NOOP line per criterion");
  verify->add_option("--out", verify_out, "output directory");
  verify->add_flag("--plot", plot, "write SVG plots");
  verify->add_option("--seed", seed, "seed for randomized sampling");
  verify->add_option("--quad-tol", quad_tol, "base quadrature tolerance (default 1e-10)");
  verify->add_option("--fixtures", fixtures, "comma-separated fixture subset; empty for a NOOP report");
  verify->add_option("--criteria", criteria, "comma-separated criterion numbers (default: all)");

  app.add_subcommand("schema", "print the config schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("schema")) {
      std::cout << schema_text();
      std::cout << "# experiments:";
      for (const std::string& n : experiment_names()) std::cout << " " << n;
      std::cout << "\n";
      return 0;
    }
    if (app.got_subcommand("run")) {
      const bool is_file = std::filesystem::is_regular_file(target);
      const bool is_name =
          std::find(experiment_names().begin(), experiment_names().end(), target) != experiment_names().end();
      if (!is_file && !is_name) fail(ErrorKind::Config, "cli", "run", "no config file or experiment named '" + target + "'");
      Config cfg = is_file ? Config::load(target) : Config::builtin(target);
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Config, "cli", "run", "--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!out_dir.empty()) cfg.set("out.dir", out_dir);
      if (plot) cfg.set("out.plot", "true");
      if (seed) cfg.set("seed", std::to_string(*seed));
      if (quad_tol) {
        std::ostringstream os;
        os.precision(17);
        os << *quad_tol;
        cfg.set("quad.tol", os.str());
      }
      if (epsilon) {
        std::ostringstream os;
        os.precision(17);
        os << *epsilon;
        cfg.set("field.epsilon", os.str());
      }
      const Summary s = run_experiment(cfg);
      print_summary(s, std::cout);
      return s.passed() ? 0 : 3;
    }
    VerifyOptions opt;
    opt.out_dir = verify_out;
    opt.plot = plot;
    if (seed) opt.seed = *seed;
    opt.quad_tol = quad_tol;
    if (fixtures) opt.fixtures = split_list(*fixtures);
    for (const std::string& c : split_list(criteria)) {
      try {
        opt.criteria.push_back(std::stoi(c));
      } catch (const std::exception&) {
        fail(ErrorKind::Config, "cli", "verify-all", "bad criterion number '" + c + "'");
      }
    }
    const auto results = verify_all(opt, &std::cout);
    const bool failed = std::any_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.status == "FAIL"; });
    const bool noop = !results.empty() && std::all_of(results.begin(), results.end(),
                                                      [](const CriterionResult& r) { return r.status == "NOOP"; });
    std::cout << (failed ? "FAIL" : noop ? "NOOP" : "PASS") << "\n";
    return failed ? 3 : 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
