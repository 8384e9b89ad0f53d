#include "hfa/scf.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace hfa {
namespace {

struct MapOutcome {
  DensityMatrix gamma;
  EigenSystem eigen;
  double mu = 0.0;
  double gap = 0.0;
};

double gap_around(const Eigen::VectorXd& values, double mu) {
  double below = -std::numeric_limits<double>::infinity();
  double above = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] < mu) below = std::max(below, values[k]);
    if (values[k] > mu) above = std::min(above, values[k]);
  }
  return above - below;
}

MapOutcome apply_map(const Eigen::MatrixXd& h_eff, const MuPolicy& policy, const Filling& filling,
                     double gap_tolerance) {
  MapOutcome out;
  out.eigen = eig_symmetric({h_eff, OperatorKind::mean_field});
  const auto& values = out.eigen.values;
  const Eigen::Index n = values.size();
  if (policy.kind == MuPolicy::Kind::fixed) {
    out.gamma = spectral_projector(out.eigen, policy.mu, gap_tolerance);
    out.mu = policy.mu;
    out.gap = gap_around(values, policy.mu);
    return out;
  }
  const Eigen::Index count = filling.particles;
  if (count > 0 && count < n) {
    out.gap = values[count] - values[count - 1];
    out.mu = 0.5 * (values[count] + values[count - 1]);
    if (out.gap <= gap_tolerance) throw EigenvalueAtMu(out.mu, values[count - 1]);
  } else {
    out.gap = std::numeric_limits<double>::infinity();
    out.mu = count == 0 ? values[0] - 1.0 : values[n - 1] + 1.0;
  }
  out.gamma = lowest_projector(out.eigen, count);
  return out;
}

struct Problem {
  const HamiltonianMatrix& h_linear;
  Eigen::MatrixXd pairs;
  EigenSystem linear;
  Filling filling;
  DensityMatrix start;

  Problem(const HamiltonianMatrix& h, const InteractionKernel& kernel, const LatticeBox& box,
          const ScfConfig& config, const std::optional<DensityMatrix>& initial)
      : h_linear(h) {
    if (h.size() != box.size()) throw DimensionMismatch("linear operator does not match the box");
    if (!(config.tol > 0.0)) throw InvalidArgument("tol must be > 0");
    if (config.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
    pairs = pair_matrix(kernel, box);
    linear = eig_symmetric(h);
    filling = resolve_filling(linear, config.mu_policy);
    if (initial) {
      if (initial->size() != h.size()) throw DimensionMismatch("start density matrix size");
      start = *initial;
    } else if (config.mu_policy.kind == MuPolicy::Kind::fixed) {
      start = spectral_projector(linear, config.mu_policy.mu, config.gap_tolerance);
    } else {
      start = lowest_projector(linear, filling.particles);
    }
  }

  Eigen::MatrixXd effective(const DensityMatrix& gamma) const {
    return h_linear.values + effective_interaction(gamma, pairs).values;
  }
};

ScfResult finish(const Problem& problem, const ScfConfig& config, DensityMatrix gamma,
                 SolverTrace trace, bool converged, Algorithm algorithm, double mu) {
  ScfResult result;
  result.h_min = {problem.effective(gamma), OperatorKind::mean_field};
  result.energy = hf_energy(gamma, problem.h_linear, problem.pairs);
  result.gamma = std::move(gamma);
  result.iterations = static_cast<int>(trace.size());
  result.trace = std::move(trace);
  result.converged = converged;
  result.mu = mu;
  result.filling = problem.filling;
  result.policy = config.mu_policy;
  result.algorithm = algorithm;
  return result;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::oda ? "oda" : "fixed_point";
}

Filling resolve_filling(const EigenSystem& linear, const MuPolicy& policy) {
  const auto& values = linear.values;
  const Eigen::Index n = values.size();
  Filling filling;
  switch (policy.kind) {
    case MuPolicy::Kind::fixed:
      filling.mu = policy.mu;
      for (Eigen::Index k = 0; k < n; ++k) filling.particles += values[k] < policy.mu ? 1 : 0;
      break;
    case MuPolicy::Kind::mid_gap_of_linear: {
      const auto gap = find_gap(std::span<const double>(values.data(), static_cast<std::size_t>(n)),
                                policy.hint);
      filling.particles = gap.band_index;
      filling.mu = gap.mu();
      break;
    }
    case MuPolicy::Kind::particle_count:
      if (policy.particles < 0 || policy.particles > n) {
        throw InvalidArgument("particle number outside 0..|box|");
      }
      filling.particles = policy.particles;
      if (policy.particles > 0 && policy.particles < n) {
        filling.mu = 0.5 * (values[policy.particles - 1] + values[policy.particles]);
      } else {
        filling.mu = policy.particles == 0 ? values[0] - 1.0 : values[n - 1] + 1.0;
      }
      break;
  }
  return filling;
}

DensityMatrix fixed_point_map(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                              const InteractionKernel& kernel, const LatticeBox& box, double mu,
                              double gap_tolerance) {
  if (gamma.size() != h_linear.size()) throw DimensionMismatch("gamma and h_linear differ in size");
  const HamiltonianMatrix h_eff{h_linear.values + effective_interaction(gamma, kernel, box).values,
                                OperatorKind::mean_field};
  return spectral_projector(h_eff, mu, gap_tolerance);
}

DensityMatrix aufbau_map(const DensityMatrix& gamma, const HamiltonianMatrix& h_linear,
                         const InteractionKernel& kernel, const LatticeBox& box,
                         Eigen::Index particles, double gap_tolerance) {
  if (gamma.size() != h_linear.size()) throw DimensionMismatch("gamma and h_linear differ in size");
  const Eigen::MatrixXd h_eff = h_linear.values + effective_interaction(gamma, kernel, box).values;
  Filling filling{particles, 0.0};
  return apply_map(h_eff, MuPolicy::particle_count(particles), filling, gap_tolerance).gamma;
}

ScfResult solve_fixed_point(const HamiltonianMatrix& h_linear, const InteractionKernel& kernel,
                            const LatticeBox& box, const ScfConfig& config,
                            const std::optional<DensityMatrix>& start) {
  const Problem problem(h_linear, kernel, box, config, start);
  DensityMatrix gamma = problem.start;
  SolverTrace trace;
  double mu = problem.filling.mu;
  for (int iteration = 1; iteration <= config.max_iter; ++iteration) {
    auto step = apply_map(problem.effective(gamma), config.mu_policy, problem.filling,
                          config.gap_tolerance);
    IterationRecord record;
    record.iteration = iteration;
    record.residual = operator_norm(step.gamma.matrix() - gamma.matrix());
    record.energy = hf_energy(step.gamma, h_linear, problem.pairs);
    record.mu = step.mu;
    record.gap = step.gap;
    trace.push_back(record);
    gamma = std::move(step.gamma);
    mu = step.mu;
    if (record.residual <= config.tol) {
      return finish(problem, config, std::move(gamma), std::move(trace), true,
                    Algorithm::fixed_point, mu);
    }
  }
  throw MaxIterExceeded(finish(problem, config, std::move(gamma), std::move(trace), false,
                               Algorithm::fixed_point, mu));
}

ScfResult solve_oda(const HamiltonianMatrix& h_linear, const InteractionKernel& kernel,
                    const LatticeBox& box, const ScfConfig& config,
                    const std::optional<DensityMatrix>& start) {
  const Problem problem(h_linear, kernel, box, config, start);
  Eigen::MatrixXd relaxed = problem.start.matrix();
  SolverTrace trace;
  double mu = problem.filling.mu;
  DensityMatrix projected;
  for (int iteration = 1; iteration <= config.max_iter; ++iteration) {
    const DensityMatrix current(relaxed);
    const Eigen::MatrixXd h_eff = problem.effective(current);
    auto step = apply_map(h_eff, config.mu_policy, problem.filling, config.gap_tolerance);
    const Eigen::MatrixXd delta = step.gamma.matrix() - relaxed;

    IterationRecord record;
    record.iteration = iteration;
    record.residual = operator_norm(delta);
    record.mu = step.mu;
    record.gap = step.gap;
    mu = step.mu;
    projected = std::move(step.gamma);

    if (record.residual <= config.tol) {
      record.step = 0.0;
      record.energy = hf_energy(current, h_linear, problem.pairs);
      trace.push_back(record);
      return finish(problem, config, std::move(projected), std::move(trace), true, Algorithm::oda,
                    mu);
    }

    // E(t) = E(relaxed) + t s + t^2 c / 2 along relaxed + t delta.
    const double slope = (h_eff.array() * delta.array()).sum();
    const double curvature = interaction_quadratic_form(delta, problem.pairs);
    double t = 1.0;
    if (curvature > 0.0 && -slope / curvature < 1.0) t = -slope / curvature;
    if (!(t > 0.0)) t = 1.0;  // slope >= 0 only through rounding next to convergence

    relaxed = (1.0 - t) * relaxed + t * projected.matrix();
    relaxed = 0.5 * (relaxed + relaxed.transpose()).eval();
    record.step = t;
    record.energy = hf_energy(DensityMatrix(relaxed), h_linear, problem.pairs);
    trace.push_back(record);
  }
  throw MaxIterExceeded(
      finish(problem, config, std::move(projected), std::move(trace), false, Algorithm::oda, mu));
}

ScfResult solve(const HamiltonianMatrix& h_linear, const InteractionKernel& kernel,
                const LatticeBox& box, const ScfConfig& config) {
  if (config.algorithm == Algorithm::oda) return solve_oda(h_linear, kernel, box, config);
  try {
    return solve_fixed_point(h_linear, kernel, box, config);
  } catch (const MaxIterExceeded&) {
    if (!config.oda_fallback) throw;
  }
  return solve_oda(h_linear, kernel, box, config);
}

double contraction_bound(const InteractionKernel& kernel, double gap, int dimension) {
  const double norm = kernel.l1_norm(dimension);
  const double margin = gap / 2.0 - 2.0 * norm;
  if (!(margin > 0.0)) {
    throw GapTooSmall("gap " + std::to_string(gap) + " does not exceed 4 |W|_1 = " +
                      std::to_string(4.0 * norm));
  }
  return norm / margin;
}

VerificationReport verify_solution(const ScfResult& result, const HamiltonianMatrix& h_linear,
                                   const InteractionKernel& kernel, const LatticeBox& box,
                                   const VerifyOptions& options) {
  VerificationReport report;
  const Eigen::MatrixXd& gamma = result.gamma.matrix();
  const Eigen::MatrixXd& h_min = result.h_min.values;
  const Eigen::MatrixXd pairs = pair_matrix(kernel, box);

  report.idempotency = operator_norm(gamma * gamma - gamma);
  report.commutator = operator_norm(gamma * h_min - h_min * gamma);
  report.relative_commutator = report.commutator / std::max(operator_norm(h_min), 1e-300);
  report.trace = gamma.trace();
  report.trace_integrality = std::abs(report.trace - std::round(report.trace));

  const EigenSystem eigen = eig_symmetric(result.h_min);
  const Eigen::Index n = eigen.values.size();
  Eigen::Index occupied = result.filling.particles;
  if (result.policy.kind == MuPolicy::Kind::fixed) {
    occupied = 0;
    for (Eigen::Index k = 0; k < n; ++k) occupied += eigen.values[k] < result.policy.mu ? 1 : 0;
  }
  if (occupied > 0 && occupied < n) {
    report.gap = eigen.values[occupied] - eigen.values[occupied - 1];
    report.mu = result.policy.kind == MuPolicy::Kind::fixed
                    ? result.policy.mu
                    : 0.5 * (eigen.values[occupied] + eigen.values[occupied - 1]);
  } else {
    report.gap = std::numeric_limits<double>::infinity();
    report.mu = result.mu;
  }

  try {
    const DensityMatrix image = apply_map(h_linear.values + effective_interaction(result.gamma, pairs).values,
                                          result.policy, result.filling, 0.0)
                                    .gamma;
    report.fixed_point_residual = operator_norm(image.matrix() - gamma);
  } catch (const EigenvalueAtMu&) {
    report.fixed_point_residual = std::numeric_limits<double>::infinity();
  }

  report.min_energy_change = std::numeric_limits<double>::infinity();
  if (occupied > 0 && occupied < n && options.rotations > 0) {
    const double base = hf_energy(result.gamma, h_linear, pairs);
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick_occupied(0, occupied - 1);
    std::uniform_int_distribution<Eigen::Index> pick_empty(occupied, n - 1);
    const double c = std::cos(options.angle);
    const double s = std::sin(options.angle);
    for (int r = 0; r < options.rotations; ++r) {
      const Eigen::VectorXd vi = eigen.vectors.col(pick_occupied(rng));
      const Eigen::VectorXd va = eigen.vectors.col(pick_empty(rng));
      // Givens rotation of the occupied vector vi towards the empty vector va.
      Eigen::MatrixXd rotated = gamma + (c * c - 1.0) * vi * vi.transpose() +
                                s * s * va * va.transpose() +
                                s * c * (vi * va.transpose() + va * vi.transpose());
      const double change = hf_energy(DensityMatrix(std::move(rotated)), h_linear, pairs) - base;
      report.min_energy_change = std::min(report.min_energy_change, change);
      ++report.rotations;
    }
  }

  if (!result.converged) report.failures.push_back("solver did not converge");
  if (report.idempotency > options.tolerance) report.failures.push_back("gamma^2 != gamma");
  if (report.relative_commutator > options.tolerance) report.failures.push_back("[gamma, H_min] != 0");
  if (report.fixed_point_residual > options.tolerance) report.failures.push_back("F(gamma) != gamma");
  if (report.trace_integrality > 1e-6) report.failures.push_back("trace is not an integer");
  if (!(report.gap > kDefaultGapTolerance)) report.failures.push_back("H_min has no gap at mu");
  if (report.rotations > 0 && report.min_energy_change < -options.energy_tolerance) {
    report.failures.push_back("energy decreases under a projector rotation");
  }
  return report;
}

}  // namespace hfa
