#include "app/config.hpp"
#include "app/csv.hpp"
#include "app/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace freqlab;
using namespace freqlab::app;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Numeric;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("freqlab_unit_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config sections, comments and typed access") {
  const Config c = Config::parse(
      "# comment\n"
      "experiment = freq-sweep\n"
      "[quad]\n"
      "tol = 1e-9   # trailing\n"
      "radial = 12\n"
      "[sweep]\n"
      "radii = 0.1, 0.2,0.4\n"
      "centers = 0,0.1; 0.2,0.3\n"
      "[out]\n"
      "plot = true\n");
  CHECK(c.str("experiment") == "freq-sweep");
  CHECK(c.number("quad.tol") == 1e-9);
  CHECK(c.integer("quad.radial") == 12);
  CHECK(c.flag("out.plot"));
  CHECK(c.list("sweep.radii") == std::vector<double>{0.1, 0.2, 0.4});
  const auto pts = c.points("sweep.centers");
  REQUIRE(pts.size() == 2);
  CHECK(pts[1](1) == 0.3);
  // Unset keys fall back to the schema default.
  CHECK(c.number("domain.amplitude") == 0.05);
}

TEST_CASE("config errors are Config errors") {
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\nbogus = 1\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\nquad.tol = 1\nquad.tol = 2\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\nquad.tol = abc\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\nquad.radial = 1.5\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\nout.plot = yes\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("quad.tol = 1e-8\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = nothing\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\n[quad\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::parse("experiment = freq-sweep\njust words\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Config::load("/nonexistent/freqlab.cfg"); }) == ErrorKind::Config);
}

TEST_CASE("every experiment has a builtin preset and the schema lists every key") {
  REQUIRE(experiment_names().size() == 8);
  for (const std::string& n : experiment_names()) CHECK(Config::builtin(n).str("experiment") == n);
  const std::string text = schema_text();
  for (const SchemaEntry& e : schema()) CHECK(text.find(e.key) != std::string::npos);
}

TEST_CASE("csv numbers round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv writer enforces the header width") {
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  CsvWriter w((dir / "t.csv").string(), {"a", "b"});
  w.row({1.5, 2LL});
  CHECK_THROWS_AS(w.row({1.0}), Error);
}

TEST_CASE("unwritable output directory is rejected before any work") {
  CHECK_THROWS(prepare_output("/proc/freqlab_cannot_write_here"));
}

TEST_CASE("freq-sweep writes its CSV schema and reruns byte-identically") {
  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  Config c = Config::builtin("freq-sweep");
  c.set("out.dir", a.string());
  const Summary s = run_experiment(c);
  CHECK(s.passed());
  CHECK(first_line(a / "freq.csv") == "center_x,center_y,r,D,H_S,H_C,N_S,N_C,R_h,R_b,Err_r,W,quad_err");
  c.set("out.dir", b.string());
  run_experiment(c);
  CHECK(slurp(a / "freq.csv") == slurp(b / "freq.csv"));
}

TEST_CASE("derivative-check reports the completed identity") {
  const fs::path dir = scratch("deriv");
  Config c = Config::builtin("derivative-check");
  c.set("out.dir", dir.string());
  const Summary s = run_experiment(c);
  CHECK(s.passed());
  CHECK(fs::exists(dir / "derivative.csv"));
}

TEST_CASE("simon experiment finds the closed-form critical set") {
  const fs::path dir = scratch("simon");
  Config c = Config::builtin("simon");
  c.set("out.dir", dir.string());
  c.set("field.epsilon", "0.3");
  const Summary s = run_experiment(c);
  CHECK(s.passed());
  CHECK(first_line(dir / "simon.csv").find("class") != std::string::npos);
}

#ifdef FREQLAB_CLI_PATH
TEST_CASE("command-line exit codes") {
  const std::string cli = FREQLAB_CLI_PATH;
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.cfg") << "experiment = freq-sweep\nbogus.key = 1\n";
  }
  auto run = [&](const std::string& args) {
    const int st = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(st);
  };
  CHECK(run("run " + (dir / "bad.cfg").string()) == 2);
  CHECK(run("run no-such-experiment") == 2);
  CHECK(run("--no-such-flag") == 2);
  CHECK(run("schema") == 0);
  CHECK(run("run derivative-check --out " + (dir / "d").string()) == 0);
  CHECK(run("verify-all --fixtures \"\" --out " + (dir / "v").string()) == 0);
}
#endif
