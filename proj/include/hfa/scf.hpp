#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hfa/errors.hpp"
#include "hfa/hamiltonian.hpp"
#include "hfa/interaction.hpp"
#include "hfa/spectral.hpp"

namespace hfa {

enum class Algorithm { fixed_point, oda };

std::string to_string(Algorithm algorithm);

/// How the chemical potential is chosen during the iteration.
///
/// `fixed`: mu is frozen, F(gamma) = 1_{<mu}(H_eff(gamma)) literally.
/// `mid_gap_of_linear`: the particle number N is read off the linear
///   operator (eigenvalues below the mid-point of its gap, the gap containing
///   `hint` or the widest one), then held fixed; mu follows the mid-point of
///   lambda_N and lambda_{N+1} of H_eff. Constant offsets of H_eff therefore
///   never change the projector.
/// `particle_count`: same, with N given explicitly (aufbau filling).
struct MuPolicy {
  enum class Kind { fixed, mid_gap_of_linear, particle_count };

  Kind kind = Kind::mid_gap_of_linear;
  double mu = 0.0;
  Eigen::Index particles = 0;
  std::optional<double> hint;

  static MuPolicy fixed(double mu) { return {Kind::fixed, mu, 0, std::nullopt}; }
  static MuPolicy mid_gap_of_linear(std::optional<double> hint = std::nullopt) {
    return {Kind::mid_gap_of_linear, 0.0, 0, hint};
  }
  static MuPolicy particle_count(Eigen::Index n) { return {Kind::particle_count, 0.0, n, std::nullopt}; }
};

struct ScfConfig {
  double tol = 1e-10;
  int max_iter = 500;
  Algorithm algorithm = Algorithm::fixed_point;
  MuPolicy mu_policy;
  double gap_tolerance = kDefaultGapTolerance;
  /// solve(): rerun with ODA when the fixed-point iteration hits max_iter.
  bool oda_fallback = false;
};

struct IterationRecord {
  int iteration = 0;
  /// Operator norm of gamma_{n+1} - gamma_n (ODA: of gamma' - relaxed gamma).
  double residual = 0.0;
  double energy = 0.0;
  double mu = 0.0;
  /// lambda_{N+1} - lambda_N of H_eff at this step.
  double gap = 0.0;
  /// ODA mixing weight; 1 for plain fixed-point steps.
  double step = 1.0;
};

using SolverTrace = std::vector<IterationRecord>;

/// Particle number and linear-model chemical potential implied by a policy.
struct Filling {
  Eigen::Index particles = 0;
  double mu = 0.0;
};

struct ScfResult {
  DensityMatrix gamma;
  HamiltonianMatrix h_min;
  SolverTrace trace;
  bool converged = false;
  int iterations = 0;
  double mu = 0.0;
  double energy = 0.0;
  Filling filling;
  MuPolicy policy;
  Algorithm algorithm = Algorithm::fixed_point;
};

class MaxIterExceeded : public Error {
 public:
  explicit MaxIterExceeded(ScfResult partial)
      : Error("SCF did not reach tol within " + std::to_string(partial.iterations) + " iterations"),
        partial_(std::move(partial)) {}

  const ScfResult& partial() const { return partial_; }

 private:
  ScfResult partial_;
};

Filling resolve_filling(const EigenSystem& linear, const MuPolicy& policy);

/// F(gamma) = 1_{<mu}(h_linear + A_eff(gamma)).
DensityMatrix fixed_point_map(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                              const InteractionKernel& kernel, const LatticeBox& box, double mu,
                              double gap_tolerance = kDefaultGapTolerance);

/// Projector onto the `particles` lowest eigenvectors of h_linear + A_eff(gamma).
DensityMatrix aufbau_map(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                         const InteractionKernel& kernel, const LatticeBox& box,
                         Eigen::Index particles, double gap_tolerance = kDefaultGapTolerance);

/// Iterates gamma_{n+1} = F(gamma_n) from gamma_0 = 1_{<=mu}(h_linear), or from
/// `start` when given.
ScfResult solve_fixed_point(const HamiltonianMatrix& h_linear, const InteractionKernel& kernel,
                            const LatticeBox& box, const ScfConfig& config,
                            const std::optional<DensityMatrix>& start = std::nullopt);

/// Optimal damping: relaxed gamma~ <- (1 - t) gamma~ + t gamma' with t the
/// exact minimiser of the quadratic HF energy on the segment.
ScfResult solve_oda(const HamiltonianMatrix& h_linear, const InteractionKernel& kernel,
                    const LatticeBox& box, const ScfConfig& config,
                    const std::optional<DensityMatrix>& start = std::nullopt);

/// Dispatches on config.algorithm, honouring config.oda_fallback.
ScfResult solve(const HamiltonianMatrix& h_linear, const InteractionKernel& kernel,
                const LatticeBox& box, const ScfConfig& config);

/// kappa = |W|_1 / (G/2 - 2 |W|_1); throws GapTooSmall unless G/2 > 2 |W|_1.
double contraction_bound(const InteractionKernel& kernel, double gap, int dimension = 1);

struct VerifyOptions {
  int rotations = 20;
  double angle = 1e-3;
  std::uint64_t seed = 0;
  /// Pass threshold for the algebraic residuals.
  double tolerance = 1e-7;
  /// Pass threshold for the energy change under a rotation.
  double energy_tolerance = 1e-8;
};

struct VerificationReport {
  double idempotency = 0.0;          // |gamma^2 - gamma|
  double commutator = 0.0;           // |[gamma, H_min]|
  double relative_commutator = 0.0;  // commutator / |H_min|
  double fixed_point_residual = 0.0; // |F(gamma) - gamma|
  double trace = 0.0;
  double trace_integrality = 0.0;    // |Tr gamma - round(Tr gamma)|
  double gap = 0.0;                  // lambda_{N+1} - lambda_N of H_min
  double mu = 0.0;
  double min_energy_change = 0.0;    // over the sampled rotations
  int rotations = 0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

VerificationReport verify_solution(const ScfResult& result, const HamiltonianMatrix& h_linear,
                                   const InteractionKernel& kernel, const LatticeBox& box,
                                   const VerifyOptions& options = {});

}  // namespace hfa
