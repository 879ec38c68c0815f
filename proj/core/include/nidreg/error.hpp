#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nidreg {

enum class ErrorKind {
  invalid_argument,
  grid_mismatch,
  decomposition,
  degenerate_density,
  degenerate_functional,
  config,
  numerical,
  internal
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Every failure mode carries a machine-readable kind
/// so the CLI can map it onto an exit code.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace nidreg
