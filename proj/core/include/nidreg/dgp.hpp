#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "nidreg/grid.hpp"
#include "nidreg/npiv.hpp"

namespace nidreg::dgp {

/// Monte Carlo design: truncated bivariate normal on the unit square,
/// projected onto the first j0 trigonometric functions in z (and k_max in w).
struct DgpConfig {
  std::optional<int> j0;  // nullopt: no truncation in z beyond k_max
  int k_max = 25;
  std::array<double, 2> mean{0.5, 0.5};
  std::array<double, 3> cov{0.05, 0.01, 0.05};  // (var_z, cov_zw, var_w)
  std::size_t n = 1000;
  std::uint64_t seed = 1;

  void validate() const;
  /// Number of z basis functions kept: j0 or k_max when j0 is infinite.
  [[nodiscard]] int z_terms() const noexcept { return j0 ? *j0 : k_max; }
};

/// Bivariate normal pdf renormalized to unit mass on [0,1]^2; zero outside.
class TruncatedNormal {
public:
  TruncatedNormal(std::array<double, 2> mean, std::array<double, 3> cov);

  [[nodiscard]] double operator()(double z, double w) const noexcept;
  [[nodiscard]] double untruncated(double z, double w) const noexcept;
  [[nodiscard]] double unit_square_mass() const noexcept { return mass_; }

private:
  std::array<double, 2> mean_;
  double inv00_, inv01_, inv11_, norm_;
  double mass_ = 1.0;
};

[[nodiscard]] double truncated_normal_density(double z, double w);

/// Composite Gauss-Legendre rule on [0,1] (panels x 20 nodes).
struct Quadrature1d {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
[[nodiscard]] Quadrature1d gauss_legendre_unit(int panels);

/// The non-identified density C * max(0, sum_{j<=J} sum_{k<=k_max} a_jk phi_j(z) phi_k(w)).
/// Evaluable anywhere on the unit square.
class NidDensity {
public:
  explicit NidDensity(const DgpConfig& config);

  [[nodiscard]] double operator()(double z, double w) const;
  /// Projection before clipping and renormalization.
  [[nodiscard]] double raw(double z, double w) const;
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const noexcept { return coef_; }
  [[nodiscard]] double normalizer() const noexcept { return c_; }
  /// Largest value over the fine evaluation grid (after renormalization).
  [[nodiscard]] double max_value() const noexcept { return max_; }
  /// Fraction of the fine evaluation grid where the projection was clipped.
  [[nodiscard]] double clipped_fraction() const noexcept { return clipped_; }
  [[nodiscard]] const DgpConfig& config() const noexcept { return config_; }

private:
  DgpConfig config_;
  Eigen::MatrixXd coef_;  // J x k_max
  double c_ = 1.0;
  double max_ = 0.0;
  double clipped_ = 0.0;
};

[[nodiscard]] npiv::DensityEstimate build_nid_density(const DgpConfig& config, const Grid& grid);
[[nodiscard]] npiv::DensityEstimate tabulate(const NidDensity& density, const Grid& grid);

/// z^10 - z^9 + z^8 - z^7 + z^6 - z^5 + z^4 + z^3 - z^2 - z
[[nodiscard]] double true_phi(double z) noexcept;

/// Projection of true_phi onto span{phi_1, ..., phi_j0}; true_phi itself when j0 is infinite.
[[nodiscard]] GridFunction best_approx(const DgpConfig& config, const Grid& grid);

using Structural = std::function<double(double)>;

/// n draws by rejection from a uniform envelope at 1.01 * max density;
/// Y = structural(Z) + eps * Z with eps ~ N(0, 1).
[[nodiscard]] npiv::NpivSample sample(const NidDensity& density, std::size_t n, std::uint64_t seed,
                                      const Structural& structural = true_phi);
[[nodiscard]] npiv::NpivSample sample(const DgpConfig& config);

struct RejectionStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};
/// Same as sample() but also reports proposal counts.
[[nodiscard]] npiv::NpivSample sample_with_stats(const NidDensity& density, std::size_t n, std::uint64_t seed,
                                                 const Structural& structural, RejectionStats& stats);

/// Envelope height used by the rejection sampler.
[[nodiscard]] double envelope_height(const NidDensity& density) noexcept;

}  // namespace nidreg::dgp
