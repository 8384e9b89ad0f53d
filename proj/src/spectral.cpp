#include "hfa/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "hfa/errors.hpp"
#include "hfa/stats.hpp"

namespace hfa {
namespace {

bool is_symmetric(const Eigen::MatrixXd& m, double relative = 1e-10) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= relative * scale;
}

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix is not square");
  if (!is_symmetric(m)) throw InvalidArgument("matrix is not symmetric");
}

DensityMatrix project_columns(const Eigen::MatrixXd& vectors, Eigen::Index count) {
  const Eigen::Index n = vectors.rows();
  if (count == 0) return DensityMatrix::zero(n);
  const auto occupied = vectors.leftCols(count);
  Eigen::MatrixXd gamma = occupied * occupied.transpose();
  // symmetrise rounding so gamma == gamma^T exactly
  gamma = 0.5 * (gamma + gamma.transpose()).eval();
  return DensityMatrix(std::move(gamma), true);
}

}  // namespace

EigenSystem eig_symmetric(const HamiltonianMatrix& m) {
  require_symmetric(m.values);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.values);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (is_symmetric(m, 0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

DensityMatrix spectral_projector(const EigenSystem& eigen, double mu, double gap_tolerance) {
  const auto& values = eigen.values;
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (std::abs(values[k] - mu) <= gap_tolerance) throw EigenvalueAtMu(mu, values[k]);
    if (values[k] < mu) ++count;
  }
  return project_columns(eigen.vectors, count);
}

DensityMatrix spectral_projector(const HamiltonianMatrix& m, double mu, double gap_tolerance) {
  return spectral_projector(eig_symmetric(m), mu, gap_tolerance);
}

DensityMatrix lowest_projector(const EigenSystem& eigen, Eigen::Index count) {
  if (count < 0 || count > eigen.values.size()) {
    throw InvalidArgument("particle number outside 0..|box|");
  }
  return project_columns(eigen.vectors, count);
}

std::vector<GapReport> interior_gaps(std::span<const double> eigenvalues, double threshold) {
  std::vector<GapReport> gaps;
  for (std::size_t k = 0; k + 1 < eigenvalues.size(); ++k) {
    const double width = eigenvalues[k + 1] - eigenvalues[k];
    if (width > threshold) {
      gaps.push_back({eigenvalues[k], eigenvalues[k + 1], static_cast<Eigen::Index>(k + 1)});
    }
  }
  std::stable_sort(gaps.begin(), gaps.end(),
                   [](const GapReport& a, const GapReport& b) { return a.width() > b.width(); });
  return gaps;
}

GapReport find_gap(std::span<const double> eigenvalues, std::optional<double> hint_mu,
                   double threshold) {
  if (eigenvalues.size() < 2) throw InvalidArgument("gap search needs at least two eigenvalues");
  if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end())) {
    throw InvalidArgument("eigenvalues must be sorted ascending");
  }
  GapReport gap;
  if (hint_mu) {
    const auto upper = std::upper_bound(eigenvalues.begin(), eigenvalues.end(), *hint_mu);
    if (upper == eigenvalues.begin() || upper == eigenvalues.end()) {
      throw NoGap("hint mu = " + std::to_string(*hint_mu) + " lies outside the spectrum");
    }
    const auto k = static_cast<std::size_t>(upper - eigenvalues.begin());
    gap = {eigenvalues[k - 1], eigenvalues[k], static_cast<Eigen::Index>(k)};
  } else {
    gap = {eigenvalues[0], eigenvalues[1], 1};
    for (std::size_t k = 1; k + 1 < eigenvalues.size(); ++k) {
      if (eigenvalues[k + 1] - eigenvalues[k] > gap.width()) {
        gap = {eigenvalues[k], eigenvalues[k + 1], static_cast<Eigen::Index>(k + 1)};
      }
    }
  }
  if (!(gap.width() >= threshold)) {
    throw NoGap("largest spectral gap " + std::to_string(gap.width()) + " is below threshold " +
                std::to_string(threshold));
  }
  return gap;
}

DecayFit fit_exponential_decay(std::span<const double> distances, std::span<const double> values,
                               double min_distance, double floor) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double magnitude = std::abs(values[i]);
    if (distances[i] >= min_distance && magnitude > floor) {
      x.push_back(distances[i]);
      y.push_back(std::log(magnitude));
    }
  }
  DecayFit fit;
  if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double d) { return d == x.front(); })) {
    return fit;
  }
  const auto line = stats::linear_fit(x, y);
  fit.amplitude = std::exp(line.intercept);
  fit.rate = -line.slope;
  fit.r_squared = line.r_squared;
  fit.points = x.size();
  fit.degenerate = false;
  return fit;
}

CombesThomasProbe combes_thomas_probe(const HamiltonianMatrix& m, std::complex<double> lambda,
                                      const LatticeBox& box, Eigen::Index x,
                                      std::span<const Eigen::Index> ys) {
  if (m.size() != box.size()) throw DimensionMismatch("operator does not match the lattice box");
  if (x < 0 || x >= m.size()) throw InvalidArgument("probe site outside the box");
  const Eigen::VectorXd spectrum = symmetric_eigenvalues(m.values);
  double distance_to_spectrum = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    distance_to_spectrum = std::min(distance_to_spectrum, std::abs(spectrum[k] - lambda));
  }
  if (distance_to_spectrum <= 1e-8) {
    throw ResolventSingular("lambda lies within 1e-8 of the spectrum");
  }

  const Eigen::Index n = m.size();
  Eigen::MatrixXcd shifted = m.values.cast<std::complex<double>>();
  shifted.diagonal().array() -= lambda;
  Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n);
  unit[x] = 1.0;
  // (M - lambda)^{-1} is complex symmetric, so column x equals row x.
  const Eigen::VectorXcd column = shifted.partialPivLu().solve(unit);

  CombesThomasProbe probe;
  for (Eigen::Index y : ys) {
    if (y < 0 || y >= n) throw InvalidArgument("probe target outside the box");
    probe.distances.push_back(static_cast<double>(box.l1_distance(x, y)));
    probe.magnitudes.push_back(std::abs(column[y]));
  }
  const double floor = 1e-13 * column.cwiseAbs().maxCoeff();
  probe.fit = fit_exponential_decay(probe.distances, probe.magnitudes, 5.0, floor);
  return probe;
}

}  // namespace hfa
