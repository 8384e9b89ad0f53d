#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hfa/lattice.hpp"
#include "hfa/multiscale.hpp"
#include "hfa/result_table.hpp"
#include "hfa/scf.hpp"
#include "hfa/stats.hpp"

namespace hfa {

enum class FillingRule { half, quarter };
enum class MuRule { mid_gap, aufbau, fixed };

std::string to_string(FillingRule rule);
std::string to_string(MuRule rule);

/// Model and run parameters shared by every experiment. The domain is the box
/// with `L` sites per axis (0..L-1 in d = 1).
struct ExperimentSpec {
  double xi = 1.0;
  double w = 1.0;
  double q = 2.0;
  Index L = 500;
  int d = 1;
  FillingRule filling = FillingRule::half;
  MuRule mu_rule = MuRule::mid_gap;
  /// Used by MuRule::fixed only.
  double mu = 0.0;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::fixed_point;
  bool oda_fallback = true;
  double tol = 1e-10;
  int max_iter = 500;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Throws InvalidArgument on non-positive sizes or negative parameters.
void validate(const ExperimentSpec& spec);

LatticeBox experiment_domain(const ExperimentSpec& spec);
/// N = |domain|/2 or |domain|/4.
Eigen::Index filling_count(const ExperimentSpec& spec);
ScfConfig scf_config(const ExperimentSpec& spec);
/// Potential of ensemble member `member` (member_seed of the base seed).
PotentialField member_potential(const ExperimentSpec& spec, std::uint64_t member);

/// Position spread of one eigenvector under the weight p(x) = |psi(x)|^2.
struct Spread {
  /// sqrt(sum_x |x - m|^2 p(x)), m = sum_x x p(x), x the site coordinates.
  double stddev = 0.0;
  /// sum_x p(x)^2.
  double ipr = 0.0;
};

Spread eigenvector_spread(const LatticeBox& box, const Eigen::VectorXd& psi);

/// sqrt((L^2 - 1) / 12): spread of a vector uniform over a chain of L sites.
double uniform_spread(Index length);

inline constexpr const char* kStddevDefinition =
    "stddev = sqrt(sum_x |x - m|^2 p(x)) with p(x) = |psi(x)|^2 and m = sum_x x p(x)";

struct ConvergenceOutcome {
  ResultTable table;
  ScfResult result;
  bool ok = false;
  std::string failure;
  /// Least-squares fit of log(residual) against iteration.
  double slope = 0.0;
  double r_squared = 0.0;
  /// exp(slope).
  double ratio = 0.0;
};

/// One solve with the full trace; columns iteration, residual, energy.
ConvergenceOutcome convergence_experiment(const ExperimentSpec& spec);

struct LocalityOutcome {
  ResultTable table;
  bool ok = false;
  std::string failure;
  Index site = 0;
  double requested_amplitude = 0.0;
  /// Amplitude after clipping V_omega(site) + delta into [0, w].
  double amplitude = 0.0;
  std::vector<double> delta_density;
  DecayFit fit;
  /// log10 of |delta(site)| over max |delta(x)| at |x - site| >= 100.
  double decades_at_100 = 0.0;
  double sum = 0.0;
};

/// Density change under V -> V + amplitude delta_site at fixed particle number;
/// columns x, delta_density, distance.
LocalityOutcome locality_experiment(const ExperimentSpec& spec, Index site, double amplitude);

struct WegnerOutcome {
  ResultTable table;
  bool ok = false;
  std::string failure;
  std::vector<double> epsilons;
  std::vector<double> mean_counts;
  std::vector<double> standard_errors;
  std::size_t used_samples = 0;
  std::size_t skipped_samples = 0;
  stats::ProportionalFit linear;
  stats::ProportionalFit square_root;
  /// Strictly smaller AIC for the linear model.
  bool linear_preferred = false;
  /// Fraction of members whose H_min has no eigenvalue in [lambda0, lambda0 + max eps]
  /// because lambda0 sits inside the gap around mu.
  double lambda0_in_gap_fraction = 0.0;
  double mean_gap_lower = 0.0;
  double mean_gap_upper = 0.0;
};

/// Ensemble mean of #{eigenvalues of H_min in [lambda0, lambda0 + eps]};
/// columns epsilon, mean_count, stderr.
WegnerOutcome wegner_experiment(const ExperimentSpec& spec, double lambda0,
                                const std::vector<double>& epsilons);

struct LocalisationOutcome {
  ResultTable table;
  bool ok = false;
  std::string failure;
  Eigen::VectorXd eigenvalues;
  std::vector<Spread> spreads;
  double median_stddev = 0.0;
  double delocalised_benchmark = 0.0;
};

/// Spread of every eigenvector of H_min; columns eigenvalue, stddev, ipr.
LocalisationOutcome localisation_experiment(const ExperimentSpec& spec);

struct GapScenario {
  std::string name;
  double xi = 0.0;
  double w = 0.0;
  double q = 0.0;
  FillingRule filling = FillingRule::half;
};

/// (xi, w, q) = (2, 3, 2), (2, 3, 7), and (0, 4, 4) at quarter filling.
std::vector<GapScenario> default_gap_scenarios();

struct GapScenarioOutcome {
  GapScenario scenario;
  bool converged = false;
  std::string failure;
  int iterations = 0;
  double mu = 0.0;
  /// lambda_{N+1} - lambda_N of H_min.
  double gap_at_mu = 0.0;
  double spectral_width = 0.0;
  /// gap_at_mu >= kGapFlagFraction * spectral_width.
  bool gap_survives = false;
  bool energy_monotone = false;
  /// Largest energy increase between consecutive iterations (<= 0 when monotone).
  double worst_energy_increase = 0.0;
  double final_residual = 0.0;
  double median_stddev = 0.0;
  double mid_spectrum_stddev = 0.0;
  /// Mean spread of the eigenvectors closest to mu over the median spread.
  double bump_statistic = 0.0;
  Eigen::VectorXd eigenvalues;
  std::vector<Spread> spreads;
};

inline constexpr double kGapFlagFraction = 0.1;

struct GapClosingOutcome {
  ResultTable table;
  bool ok = false;
  std::vector<GapScenarioOutcome> scenarios;
};

/// Each scenario solved with ODA at aufbau filling on the domain and seed of `spec`;
/// columns scenario, eigenvalue, stddev, ipr.
GapClosingOutcome gap_closing_experiment(const ExperimentSpec& spec,
                                         const std::vector<GapScenario>& scenarios = default_gap_scenarios());

struct PeriodicSweepOutcome {
  ResultTable table;
  bool ok = false;
  std::string failure;
  std::vector<double> xi_values;
  std::vector<double> mean_stddev;
  std::vector<double> standard_errors;
  double spearman_rho = 0.0;
  /// One-sided p-value for rho < 0.
  double p_value = 1.0;
};

/// Linear problem (q = 0): ensemble mean of the average eigenvector spread per xi;
/// columns xi, mean_stddev, stderr.
PeriodicSweepOutcome periodic_sweep(const ExperimentSpec& spec, const std::vector<double>& xi_values);

struct MultiscaleKnobs {
  double lambda = 2.0;
  double zeta_box = 0.5;
  std::vector<Index> radii{5, 10};
  LocalityConstants constants;
  Index margin = 10;

  bool operator==(const MultiscaleKnobs&) const = default;
};

struct MultiscaleOutcome {
  ResultTable table;
  bool ok = false;
  std::vector<ProbabilityEstimate> estimates;
};

/// good_box_probability per radius; columns radius, estimate, stderr,
/// resonant_boxes, failed_solves.
MultiscaleOutcome multiscale_probe(const ExperimentSpec& spec, const MultiscaleKnobs& knobs);

struct VerifyOutcome {
  ResultTable table;
  bool ok = false;
  std::string failure;
  VerificationReport report;
};

/// One solve followed by verify_solution; a single row of residuals.
VerifyOutcome verify_experiment(const ExperimentSpec& spec);

}  // namespace hfa
