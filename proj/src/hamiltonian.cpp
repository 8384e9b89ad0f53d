#include "hfa/hamiltonian.hpp"

#include "hfa/errors.hpp"

namespace hfa {

DensityMatrix::DensityMatrix(Eigen::MatrixXd values, bool projector)
    : values_(std::move(values)), projector_(projector) {
  if (values_.rows() != values_.cols()) throw DimensionMismatch("density matrix must be square");
  trace_ = values_.trace();
}

DensityMatrix DensityMatrix::zero(Eigen::Index n) {
  return DensityMatrix(Eigen::MatrixXd::Zero(n, n), true);
}

HamiltonianMatrix build_hamiltonian(const LatticeBox& box, const PotentialField& potential) {
  if (potential.size() != box.size()) {
    throw DimensionMismatch("potential has " + std::to_string(potential.size()) +
                            " sites, box has " + std::to_string(box.size()));
  }
  const Index n = box.size();
  HamiltonianMatrix h{Eigen::MatrixXd::Zero(n, n), OperatorKind::linear};
  h.values.diagonal() = potential.values();
  for (Index i = 0; i < n; ++i) {
    for (Index j : box.neighbours(i)) h.values(i, j) = 1.0;
  }
  return h;
}

HamiltonianMatrix effective_interaction(const DensityMatrix& gamma, const Eigen::MatrixXd& pairs) {
  if (pairs.rows() != gamma.size()) {
    throw DimensionMismatch("density matrix does not match the interaction domain");
  }
  HamiltonianMatrix a{-pairs.cwiseProduct(gamma.matrix()), OperatorKind::generic};
  a.values.diagonal() += pairs * gamma.matrix().diagonal();
  return a;
}

HamiltonianMatrix effective_interaction(const DensityMatrix& gamma, const InteractionKernel& kernel,
                                        const LatticeBox& box) {
  if (gamma.size() != box.size()) {
    throw DimensionMismatch("density matrix does not match the lattice box");
  }
  return effective_interaction(gamma, pair_matrix(kernel, box));
}

double interaction_quadratic_form(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& pairs) {
  const Eigen::VectorXd diag = delta.diagonal();
  const double hartree = diag.dot(pairs * diag);
  const double exchange = (pairs.array() * delta.array().square()).sum();
  return hartree - exchange;
}

double hf_energy(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                 const Eigen::MatrixXd& pairs) {
  if (h_linear.size() != gamma.size() || pairs.rows() != gamma.size()) {
    throw DimensionMismatch("energy arguments differ in size");
  }
  const double kinetic = (h_linear.values.array() * gamma.matrix().array()).sum();
  return kinetic + 0.5 * interaction_quadratic_form(gamma.matrix(), pairs);
}

double hf_energy(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                 const InteractionKernel& kernel, const LatticeBox& box) {
  if (gamma.size() != box.size()) {
    throw DimensionMismatch("density matrix does not match the lattice box");
  }
  return hf_energy(gamma, h_linear, pair_matrix(kernel, box));
}

}  // namespace hfa
