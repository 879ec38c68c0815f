#pragma once

#include <nidreg/error.hpp>
#include <nidreg/grid.hpp>
#include <nidreg/random.hpp>
#include <nidreg/spectral.hpp>

#include <doctest.h>

#include <functional>

namespace testutil {

inline nidreg::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const nidreg::Error& e) {
    return e.kind();
  }
  FAIL("expected nidreg::Error");
  return nidreg::ErrorKind::internal;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, nidreg::Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline nidreg::GridFunction random_function(const nidreg::Grid& g, nidreg::Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (auto& x : v) x = rng.normal();
  return {g, v};
}

inline nidreg::DiscreteOperator random_operator(std::size_t m, nidreg::Rng& rng) {
  const auto g = nidreg::make_grid(m);
  const auto k = static_cast<Eigen::Index>(m);
  return {random_matrix(k, k, rng), g, g};
}

inline double l2_distance(const nidreg::GridFunction& a, const nidreg::GridFunction& b) {
  return nidreg::l2_norm(a - b);
}

}  // namespace testutil
