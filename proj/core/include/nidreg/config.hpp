#pragma once

#include <string>

#include "nidreg/experiments.hpp"

namespace nidreg::config {

/// Whole file as a string; config error when unreadable.
[[nodiscard]] std::string read_file(const std::string& path);

// Each loader takes the JSON text of one flat object. Missing keys keep their
// defaults; unknown keys and type mismatches raise ErrorKind::config with the
// offending field and its line.
[[nodiscard]] bench::McConfig load_mc(const std::string& text);
[[nodiscard]] bench::CoverageConfig load_coverage(const std::string& text);
[[nodiscard]] bench::LimitRunConfig load_limit_check(const std::string& text);
[[nodiscard]] bench::BoundConfig load_bound(const std::string& text);
[[nodiscard]] bench::FiltersConfig load_filters(const std::string& text);

[[nodiscard]] Scheme parse_scheme(const std::string& name);

}  // namespace nidreg::config
