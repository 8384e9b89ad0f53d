#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hfa/hamiltonian.hpp"
#include "hfa/lattice.hpp"

namespace hfa {

inline constexpr double kDefaultGapTolerance = 1e-8;
inline constexpr double kDefaultGapThreshold = 1e-6;

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

EigenSystem eig_symmetric(const HamiltonianMatrix& m);
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

/// Spectral norm; symmetric input goes through its eigenvalues, anything
/// else through the largest singular value.
double operator_norm(const Eigen::MatrixXd& m);

/// Projector onto the eigenvectors with eigenvalue below mu. Throws
/// EigenvalueAtMu when an eigenvalue lies within `gap_tolerance` of mu.
DensityMatrix spectral_projector(const HamiltonianMatrix& m, double mu,
                                 double gap_tolerance = kDefaultGapTolerance);
DensityMatrix spectral_projector(const EigenSystem& eigen, double mu,
                                 double gap_tolerance = kDefaultGapTolerance);

/// Projector onto the `count` lowest eigenvectors (aufbau filling).
DensityMatrix lowest_projector(const EigenSystem& eigen, Eigen::Index count);

/// Spectral gap (lower, upper) with nothing strictly between them.
struct GapReport {
  double lower = 0.0;
  double upper = 0.0;
  /// Number of eigenvalues at or below `lower`.
  Eigen::Index band_index = 0;

  double width() const { return upper - lower; }
  double mu() const { return 0.5 * (lower + upper); }
};

/// Every interior gap wider than `threshold`, widest first.
std::vector<GapReport> interior_gaps(std::span<const double> eigenvalues,
                                     double threshold = kDefaultGapThreshold);

/// The gap containing `hint_mu`, or the widest interior gap without a hint.
/// Throws NoGap when the selected gap is narrower than `threshold`.
GapReport find_gap(std::span<const double> eigenvalues, std::optional<double> hint_mu = std::nullopt,
                   double threshold = kDefaultGapThreshold);

/// Exponential fit |G(x, y)| ~ amplitude * exp(-rate |x - y|).
struct DecayFit {
  double amplitude = 0.0;
  double rate = std::numeric_limits<double>::infinity();
  double r_squared = 1.0;
  std::size_t points = 0;
  bool degenerate = true;
};

/// Fits log|values| against distance over points with distance >= min_distance
/// and |value| above `floor`. Degenerate (infinite rate) when fewer than two
/// such points remain.
DecayFit fit_exponential_decay(std::span<const double> distances, std::span<const double> values,
                               double min_distance, double floor);

/// Resolvent column |(delta_x, (M - lambda)^{-1} delta_y)| for every y and its
/// exponential decay fit in |x - y| (l1 distance, |x-y| >= 5).
struct CombesThomasProbe {
  std::vector<double> distances;
  std::vector<double> magnitudes;
  DecayFit fit;
};

CombesThomasProbe combes_thomas_probe(const HamiltonianMatrix& m, std::complex<double> lambda,
                                      const LatticeBox& box, Eigen::Index x,
                                      std::span<const Eigen::Index> ys);

}  // namespace hfa
