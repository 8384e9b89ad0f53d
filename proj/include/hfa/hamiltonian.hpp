#pragma once

#include <Eigen/Core>

#include "hfa/interaction.hpp"
#include "hfa/lattice.hpp"
#include "hfa/potential.hpp"

namespace hfa {

enum class OperatorKind { linear, mean_field, generic };

/// Dense real symmetric one-particle operator on l2(box).
struct HamiltonianMatrix {
  Eigen::MatrixXd values;
  OperatorKind kind = OperatorKind::generic;

  Eigen::Index size() const { return values.rows(); }
};

/// One-particle density matrix: real symmetric with spectrum in [0, 1].
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Eigen::MatrixXd values, bool projector = false);

  static DensityMatrix zero(Eigen::Index n);

  const Eigen::MatrixXd& matrix() const { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  Eigen::Index size() const { return values_.rows(); }
  double trace() const { return trace_; }
  bool is_projector() const { return projector_; }

 private:
  Eigen::MatrixXd values_;
  double trace_ = 0.0;
  bool projector_ = false;
};

/// -Delta + V with unit hopping between adjacent sites and V on the diagonal.
HamiltonianMatrix build_hamiltonian(const LatticeBox& box, const PotentialField& potential);

/// A(x,y) = delta_{xy} sum_n W(n - y) gamma(n,n) - W(x - y) gamma(x,y).
HamiltonianMatrix effective_interaction(const DensityMatrix& gamma, const InteractionKernel& kernel,
                                        const LatticeBox& box);
/// Same, with W(x - y) already tabulated by pair_matrix().
HamiltonianMatrix effective_interaction(const DensityMatrix& gamma, const Eigen::MatrixXd& pairs);

/// Hartree-Fock energy Tr(H gamma) + Hartree - exchange.
double hf_energy(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                 const InteractionKernel& kernel, const LatticeBox& box);
double hf_energy(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                 const Eigen::MatrixXd& pairs);

/// Quadratic part sum_{x,y} W(x-y) [D(x,x) D(y,y) - D(x,y)^2] = Tr(A(D) D).
double interaction_quadratic_form(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& pairs);

}  // namespace hfa
