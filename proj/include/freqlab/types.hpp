#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace freqlab {

// Points live in R^2 or R^3; tangential coordinates in R^1 or R^2.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
inline Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

enum class ErrorKind {
  Domain,        // argument outside the operation's domain
  Precondition,  // mathematical hypothesis violated (e.g. theta(4r) >= 1/26)
  Numeric,       // quadrature / solver / non-finite evaluation
  Quality,       // result computed but rejected by a certificate
  Degenerate,    // trivial or constant field
  Config,        // CLI / config schema
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string op, const std::string& message);

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }
  const std::string& op() const { return op_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string op_;
};

[[noreturn]] void fail(ErrorKind kind, const char* module, const char* op, const std::string& message);

std::string format_point(const Vec& x);

}  // namespace freqlab
