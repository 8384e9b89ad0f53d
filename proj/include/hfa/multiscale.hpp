#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hfa/hamiltonian.hpp"
#include "hfa/lattice.hpp"
#include "hfa/potential.hpp"
#include "hfa/scf.hpp"

namespace hfa {

/// Lambda_L(n) = {x : |x - n|_inf <= L}, always intersected with a domain.
struct Box {
  Coordinates center;
  Index radius = 0;

  bool contains(const LatticeBox& domain, Index site) const;
  /// Sites of the box inside `domain`, ascending.
  std::vector<Index> sites(const LatticeBox& domain) const;
  /// Domain sites outside the box, ascending.
  std::vector<Index> complement(const LatticeBox& domain) const;
};

/// K restricted to `sites`, indexed over those sites only.
HamiltonianMatrix restrict(const HamiltonianMatrix& k, std::span<const Index> sites);
HamiltonianMatrix restrict(const HamiltonianMatrix& k, const LatticeBox& domain, const Box& box);

/// Gamma(x,y) = K(x,y) when exactly one of x, y lies in the box, else 0.
Eigen::SparseMatrix<double> border_operator(const HamiltonianMatrix& k, const LatticeBox& domain,
                                            const Box& box);

/// |(K - lambda)^{-1}(x,y) + sum_{u in box, v outside} (K^box - lambda)^{-1}(x,u)
///  Gamma(u,v) (K - lambda)^{-1}(v,y)| for x in the box and y outside.
double geometric_resolvent_residual(const HamiltonianMatrix& k, const LatticeBox& domain,
                                    const Box& box, std::complex<double> lambda, Index x, Index y);

/// Largest residual over every pair x in the box, y outside.
double max_geometric_resolvent_residual(const HamiltonianMatrix& k, const LatticeBox& domain,
                                        const Box& box, std::complex<double> lambda);

/// Everything needed to solve the mean-field problem on an ambient domain.
struct ModelInputs {
  LatticeBox domain;
  PotentialField potential;
  InteractionKernel kernel;
  ScfConfig scf;
};

/// Mean-field operator of the potential with its random part cut off outside
/// Lambda_{2L}(n), restricted to Lambda_L(n).
struct HattedHamiltonian {
  Box box;
  std::vector<Index> sites;
  HamiltonianMatrix local;
  /// Full mean-field operator of the cut-off potential on the ambient domain.
  HamiltonianMatrix ambient;
  ScfResult solution;
};

/// V_hat = V0 + (V_omega on Lambda_{2L}(n), 0 elsewhere).
PotentialField cutoff_potential(const LatticeBox& domain, const PotentialField& potential,
                                const Coordinates& center, Index radius);

HattedHamiltonian hatted_hamiltonian(const Coordinates& center, Index radius,
                                     const ModelInputs& model);

/// Constants of ||(H_min)|box - H_hat|| < D exp(-nu L).
struct LocalityConstants {
  double D = 1.0;
  double nu = 1.0;

  bool operator==(const LocalityConstants&) const = default;
};

/// e^{-sqrt L} + 2 D e^{-nu L}.
double resonance_threshold(Index radius, const LocalityConstants& constants);

struct ResonanceVerdict {
  bool resonant = false;
  double distance = 0.0;   // d(lambda, sigma(H_hat))
  double threshold = 0.0;  // resonance_threshold
  /// distance - threshold; resonant iff margin <= 0.
  double margin = 0.0;
  /// distance - (e^{-sqrt L} - 2 D e^{-nu L}).
  double inner_margin = 0.0;
};

ResonanceVerdict is_resonant(double lambda, const HattedHamiltonian& hat,
                             const LocalityConstants& constants);

struct GoodBoxVerdict {
  bool good = false;
  ResonanceVerdict resonance;
  std::size_t probes = 0;
  std::size_t failed_probes = 0;
  /// max over probes of lhs / exp(-zeta |y - x|).
  double worst_ratio = 0.0;
};

/// Decay condition of an (L, zeta, lambda)-good box with A_c = 0; throws
/// ResonantBox when lambda is resonant.
GoodBoxVerdict good_box_check(double lambda, const HattedHamiltonian& hat, double zeta_box,
                              const LocalityConstants& constants, Index interaction_range,
                              const LatticeBox& domain);

enum class BoxClass { good, bad, resonant };
BoxClass classify_box(double lambda, const HattedHamiltonian& hat, double zeta_box,
                      const LocalityConstants& constants, Index interaction_range,
                      const LatticeBox& domain);

/// Parameters of the 1D ensemble used by good_box_probability.
struct EnsembleModel {
  double xi = 1.0;
  double w = 1.0;
  double q = 0.0;
  /// Sites added beyond Lambda_{2L} of both boxes at either end of the chain.
  Index margin = 10;
  LocalityConstants constants;
  ScfConfig scf;
};

struct ProbabilityEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::size_t both_good = 0;
  std::size_t resonant_boxes = 0;
  std::size_t failed_solves = 0;
};

/// Monte Carlo frequency of two boxes Lambda_L(n1), Lambda_L(n2) at distance
/// 2L apart both being good. Solver failures count as "not good".
ProbabilityEstimate good_box_probability(double lambda, Index radius, double zeta_box,
                                         std::size_t n_samples, std::uint64_t seed,
                                         const EnsembleModel& model);

struct LocalityCalibration {
  LocalityConstants constants;
  double r_squared = 0.0;
  std::vector<Index> radii;
  std::vector<double> truncation_errors;
};

/// ||(H_min)|Lambda_L(n) - H_hat(n, L)|| for each radius and a fit D e^{-nu L}.
LocalityCalibration calibrate_locality(const ModelInputs& model, const Coordinates& center,
                                       std::span<const Index> radii);

}  // namespace hfa
