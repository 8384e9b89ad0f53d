#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "hfa/lattice.hpp"

namespace hfa {

/// Stateless counter-based uniform stream: the draw for (seed, counter) does
/// not depend on the order in which draws are requested.
double uniform_draw(std::uint64_t seed, std::uint64_t counter);

/// Seed of ensemble member `member` derived from a base seed.
std::uint64_t member_seed(std::uint64_t base_seed, std::uint64_t member);

/// V = V0 + V_omega on a lattice box. V0 alternates +xi/-xi with the parity of
/// the coordinate sum; V_omega(x) is uniform on [0, w].
class PotentialField {
 public:
  PotentialField(const LatticeBox& box, double periodic_amplitude, double disorder_width,
                 std::uint64_t seed);

  /// Explicit parts, e.g. perturbed or partially resampled potentials.
  PotentialField(Eigen::VectorXd periodic, Eigen::VectorXd random, double periodic_amplitude,
                 double disorder_width, std::optional<std::uint64_t> seed);

  Eigen::Index size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::VectorXd& periodic_part() const { return periodic_; }
  const Eigen::VectorXd& random_part() const { return random_; }
  double periodic_amplitude() const { return periodic_amplitude_; }
  double disorder_width() const { return disorder_width_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  /// Copy with `delta` added to the random part at one site.
  PotentialField with_random_shift(Index site, double delta) const;
  /// Copy with the whole potential shifted by a constant (added to the random part).
  PotentialField shifted(double constant) const;

 private:
  Eigen::VectorXd periodic_;
  Eigen::VectorXd random_;
  Eigen::VectorXd values_;
  double periodic_amplitude_ = 0.0;
  double disorder_width_ = 0.0;
  std::optional<std::uint64_t> seed_;
};

}  // namespace hfa
