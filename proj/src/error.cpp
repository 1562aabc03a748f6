#include "nlsb/error.hpp"

namespace nlsb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Bracket: return "bracket error";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Positivity: return "positivity error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::LinearSolver: return "linear-solver error";
    case ErrorKind::Decomposition: return "decomposition error";
    case ErrorKind::Spectral: return "spectral error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nlsb
