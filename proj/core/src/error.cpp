#include "nidreg/error.hpp"

namespace nidreg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::decomposition: return "decomposition-error";
    case ErrorKind::degenerate_density: return "degenerate-density";
    case ErrorKind::degenerate_functional: return "degenerate-functional";
    case ErrorKind::config: return "config-error";
    case ErrorKind::numerical: return "numerical-failure";
    case ErrorKind::internal: return "internal-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nidreg
