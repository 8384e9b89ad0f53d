#include "hfa/interaction.hpp"

#include <cmath>

#include "hfa/errors.hpp"

namespace hfa {

InteractionKernel::InteractionKernel(std::vector<double> table,
                                     std::optional<DecayConstants> decay)
    : table_(std::move(table)), decay_(decay) {
  if (table_.empty()) throw InvalidArgument("interaction table must contain W(0)");
  if (decay_) {
    for (std::size_t r = 0; r < table_.size(); ++r) {
      const double bound = decay_->amplitude * std::exp(-decay_->rate * static_cast<double>(r));
      if (std::abs(table_[r]) > bound * (1.0 + 1e-12)) {
        throw InvalidArgument("interaction table violates its exponential decay bound at r = " +
                              std::to_string(r));
      }
    }
  }
}

InteractionKernel InteractionKernel::next_nearest(double q) {
  if (q < 0.0 || !std::isfinite(q)) throw InvalidArgument("interaction strength q must be >= 0");
  return InteractionKernel({q, q / 2.0, q / 4.0, q / 4.0});
}

double InteractionKernel::operator()(Index r) const {
  if (r < 0) r = -r;
  return r < static_cast<Index>(table_.size()) ? table_[static_cast<std::size_t>(r)] : 0.0;
}

double InteractionKernel::l1_norm(int dimension) const {
  double total = 0.0;
  for (std::size_t r = 0; r < table_.size(); ++r) {
    total += static_cast<double>(lattice_shell_count(dimension, static_cast<Index>(r))) *
             std::abs(table_[r]);
  }
  return total;
}

bool InteractionKernel::is_zero() const {
  for (double w : table_) {
    if (w != 0.0) return false;
  }
  return true;
}

Eigen::MatrixXd pair_matrix(const InteractionKernel& kernel, const LatticeBox& box) {
  const Index n = box.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (box.dimension() == 1) {
    for (Index r = 0; r <= std::min<Index>(kernel.range(), n - 1); ++r) {
      const double value = kernel(r);
      for (Index i = 0; i + r < n; ++i) {
        w(i, i + r) = value;
        w(i + r, i) = value;
      }
    }
    return w;
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) w(i, j) = kernel(box.l1_distance(i, j));
  }
  return w;
}

}  // namespace hfa
