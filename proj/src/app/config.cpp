#include "app/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace freqlab::app {

namespace {

constexpr const char* kModule = "cli";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) fail(ErrorKind::Config, kModule, "config", key + ": not a number: '" + v + "'");
  return x;
}

void validate(const SchemaEntry& e, const std::string& v) {
  switch (e.type) {
    case ValueType::String:
      break;
    case ValueType::Int: {
      const double x = parse_double(e.key, v);
      if (x != static_cast<long long>(x)) fail(ErrorKind::Config, kModule, "config", e.key + ": not an integer: '" + v + "'");
      break;
    }
    case ValueType::Double:
      parse_double(e.key, v);
      break;
    case ValueType::Bool:
      if (v != "true" && v != "false") fail(ErrorKind::Config, kModule, "config", e.key + ": expected true or false");
      break;
    case ValueType::List:
      for (const std::string& s : split(v, ',')) parse_double(e.key, s);
      break;
    case ValueType::Points:
      for (const std::string& p : split(v, ';')) {
        const auto c = split(p, ',');
        if (c.size() != 2 && c.size() != 3) fail(ErrorKind::Config, kModule, "config", e.key + ": points need 2 or 3 coordinates");
        for (const std::string& s : c) parse_double(e.key, s);
      }
      break;
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"freq-sweep",        "doubling",        "derivative-check",
                                              "straighten-verify", "critical-pipeline", "conformal-count",
                                              "spvar-fit",         "simon"};
  return names;
}

const std::vector<SchemaEntry>& schema() {
  using T = ValueType;
  static const std::vector<SchemaEntry> s{
      {"experiment", T::String, "", "freq-sweep | doubling | derivative-check | straighten-verify | critical-pipeline | conformal-count | spvar-fit | simon"},
      {"seed", T::Int, "1", "seed for every randomized sample"},
      {"out.dir", T::String, "out", "output directory"},
      {"out.plot", T::Bool, "false", "write SVG plots"},
      {"domain.family", T::String, "flat", "flat | bump | power | cosine"},
      {"domain.dimension", T::Int, "2", "2 or 3"},
      {"domain.amplitude", T::Double, "0.05", "a in a|x|^2, a|x|^{1+alpha}, a(1 - cos(omega x))"},
      {"domain.alpha", T::Double, "0.5", "exponent of the power family"},
      {"domain.omega", T::Double, "1.5", "frequency of the cosine family"},
      {"domain.R", T::Double, "1", "scale R; fields are built on D ∩ B_{2R}"},
      {"field.kind", T::String, "poly", "poly | mfs | simon"},
      {"field.degree", T::Int, "2", "degree k of the homogeneous harmonic polynomial (poly) or of the MFS data"},
      {"field.coefs", T::List, "", "d = 2: coefficients a_0, a_1, ... of Im(sum a_k z^k); overrides field.degree"},
      {"field.epsilon", T::Double, "0.3", "epsilon of the Simon fixture"},
      {"mfs.charges", T::Int, "0", "charge count; 0 = 160 (d = 2) or 600 (d = 3)"},
      {"mfs.offset", T::Double, "0", "charge offset; 0 = half the window radius"},
      {"mfs.boundary_tol", T::Double, "1e-6", "accepted graph residual relative to the interior RMS"},
      {"quad.radial", T::Int, "16", "Gauss-Legendre order in the radius"},
      {"quad.angular", T::Int, "32", "angular panel order / initial trapezoid count"},
      {"quad.tol", T::Double, "1e-8", "relative quadrature tolerance"},
      {"freq.C_mod", T::Double, "1", "constant C of the modified boundary frequency"},
      {"freq.fd_step_rel", T::Double, "1e-3", "central-difference step for dN/dr, relative to r"},
      {"sweep.centers", T::Points, "0,0", "centers, `x,y; x,y` or `x,y,z; ...`"},
      {"sweep.radii", T::List, "0.1,0.25,0.5,1", "radii"},
      {"sweep.a", T::List, "2", "doubling factors a"},
      {"sweep.samples", T::Int, "200", "random samples (spvar pairs, doubling certificate samples)"},
      {"straighten.moll_pts", T::Int, "128", "mollifier quadrature points per axis"},
      {"straighten.ball_search_grid", T::Int, "16", "grid of the working-ball search"},
      {"straighten.bump_radius", T::Double, "0.08", "radius of the weak-residual test bumps"},
      {"straighten.holder_alpha", T::Double, "0", "Hölder exponent probed; 0 = the domain's alpha"},
      {"straighten.holder_levels", T::Int, "8", "pair levels h0 4^-j"},
      {"critical.spacing", T::Double, "0.05", "seed grid spacing"},
      {"critical.grad_tol", T::Double, "1e-10", "acceptance |∇u| relative to max |∇u|"},
      {"critical.radius", T::Double, "1", "detection region D ∩ B_radius"},
      {"critical.radii", T::List, "0.1,0.05,0.025", "content radii"},
      {"conformal.R", T::Double, "0.5", "R of the conformal map"},
      {"conformal.rho", T::Double, "0.5", "counting radius"},
      {"pipeline.R", T::Double, "1", "R of the theorem pipeline"},
  };
  return s;
}

std::string schema_text() {
  std::ostringstream os;
  os << "# key = default    # type: help\n";
  for (const SchemaEntry& e : schema()) {
    const char* t = "";
    switch (e.type) {
      case ValueType::String: t = "string"; break;
      case ValueType::Int: t = "int"; break;
      case ValueType::Double: t = "number"; break;
      case ValueType::Bool: t = "bool"; break;
      case ValueType::List: t = "list"; break;
      case ValueType::Points: t = "points"; break;
    }
    os << e.key << " = " << e.fallback << "    # " << t << ": " << e.help << "\n";
  }
  return os.str();
}

const SchemaEntry& Config::entry(const std::string& key) const {
  for (const SchemaEntry& e : schema())
    if (e.key == key) return e;
  fail(ErrorKind::Config, kModule, "config", "unknown key '" + key + "' in " + origin_);
}

void Config::set(const std::string& key, const std::string& value) {
  const SchemaEntry& e = entry(key);
  validate(e, value);
  if (key == "experiment" &&
      std::find(experiment_names().begin(), experiment_names().end(), value) == experiment_names().end())
    fail(ErrorKind::Config, kModule, "config", "unknown experiment '" + value + "'");
  values_[key] = value;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Config, kModule, "config", origin + ":" + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Config, kModule, "config", origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (c.values_.count(key)) fail(ErrorKind::Config, kModule, "config", origin + ": duplicate key '" + key + "'");
    c.set(key, trim(line.substr(eq + 1)));
  }
  if (!c.has("experiment")) fail(ErrorKind::Config, kModule, "config", origin + ": missing key 'experiment'");
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, kModule, "config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::builtin(const std::string& name) {
  static const std::map<std::string, std::string> presets{
      {"freq-sweep", "experiment = freq-sweep\nfield.degree = 2\nsweep.centers = 0,0; 0.3,0.4; -0.2,0.15\n"},
      {"doubling",
       "experiment = doubling\nfield.degree = 3\nsweep.centers = 0,0; 0.2,0.3\nsweep.radii = 0.05,0.1,0.2\nsweep.a = 2,4\n"},
      {"derivative-check",
       "experiment = derivative-check\ndomain.family = bump\nfield.kind = mfs\nfield.degree = 3\n"
       "sweep.centers = 0.2,0.1; 0,0.3\nsweep.radii = 0.05,0.2,0.4\n"},
      {"straighten-verify",
       "experiment = straighten-verify\ndomain.family = bump\nfield.kind = mfs\nfield.degree = 3\nsweep.samples = 120\n"},
      {"critical-pipeline", "experiment = critical-pipeline\nfield.degree = 2\n"},
      {"conformal-count",
       "experiment = conformal-count\ndomain.family = bump\ndomain.amplitude = 0.001\nfield.kind = mfs\nfield.degree = 3\n"},
      {"spvar-fit",
       "experiment = spvar-fit\nfield.coefs = 0,0.5,0.3,1,0.2\nsweep.radii = 0.1,0.2\nsweep.samples = 40\n"},
      {"simon", "experiment = simon\nfield.kind = simon\ndomain.dimension = 3\n"},
  };
  const auto it = presets.find(name);
  if (it == presets.end()) fail(ErrorKind::Config, kModule, "config", "unknown experiment '" + name + "'");
  return parse(it->second, "builtin:" + name);
}

std::string Config::raw(const std::string& key) const {
  const SchemaEntry& e = entry(key);
  const auto it = values_.find(key);
  return it != values_.end() ? it->second : e.fallback;
}

std::string Config::str(const std::string& key) const { return raw(key); }
int Config::integer(const std::string& key) const { return static_cast<int>(parse_double(key, raw(key))); }
double Config::number(const std::string& key) const { return parse_double(key, raw(key)); }
bool Config::flag(const std::string& key) const { return raw(key) == "true"; }

std::vector<double> Config::list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& s : split(raw(key), ',')) out.push_back(parse_double(key, s));
  return out;
}

std::vector<Vec> Config::points(const std::string& key) const {
  std::vector<Vec> out;
  for (const std::string& p : split(raw(key), ';')) {
    const auto c = split(p, ',');
    Vec v(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(key, c[i]);
    out.push_back(v);
  }
  return out;
}

}  // namespace freqlab::app
