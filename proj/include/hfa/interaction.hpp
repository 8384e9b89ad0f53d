#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hfa/lattice.hpp"

namespace hfa {

/// Bound |W(r)| <= amplitude * exp(-rate * r).
struct DecayConstants {
  double amplitude = 0.0;
  double rate = 0.0;
};

/// Translation-invariant pair interaction W(x - y) depending on the l1
/// distance |x - y|, tabulated for r = 0..r_max and zero beyond.
class InteractionKernel {
 public:
  explicit InteractionKernel(std::vector<double> table,
                             std::optional<DecayConstants> decay = std::nullopt);

  /// W(0)=q, W(1)=q/2, W(2)=W(3)=q/4, zero from r=4 on.
  static InteractionKernel next_nearest(double q);

  double operator()(Index r) const;
  Index range() const { return static_cast<Index>(table_.size()) - 1; }
  const std::vector<double>& table() const { return table_; }
  const std::optional<DecayConstants>& decay() const { return decay_; }

  /// sum_{n in Z^d} |W(n)|.
  double l1_norm(int dimension = 1) const;

  bool is_zero() const;

 private:
  std::vector<double> table_;
  std::optional<DecayConstants> decay_;
};

/// The matrix W(x - y) over the sites of a box.
Eigen::MatrixXd pair_matrix(const InteractionKernel& kernel, const LatticeBox& box);

}  // namespace hfa
