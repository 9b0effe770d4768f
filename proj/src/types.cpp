#include "freqlab/types.hpp"

#include <sstream>

namespace freqlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Quality: return "quality";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, std::string op, const std::string& message)
    : std::runtime_error(module + "::" + op + ": " + to_string(kind) + " error: " + message),
      kind_(kind),
      module_(std::move(module)),
      op_(std::move(op)) {}

void fail(ErrorKind kind, const char* module, const char* op, const std::string& message) {
  throw Error(kind, module, op, message);
}

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace freqlab
