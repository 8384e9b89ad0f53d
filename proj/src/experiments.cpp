#include "hfa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hfa/errors.hpp"
#include "hfa/hamiltonian.hpp"
#include "hfa/parallel.hpp"
#include "hfa/spectral.hpp"

namespace hfa {
namespace {

// The density difference tail must stay above the solver noise floor for the fit.
constexpr double kLocalityTol = 1e-12;
constexpr std::size_t kBumpWindow = 10;

std::string format_integer(std::size_t value) { return std::to_string(value); }

PotentialField run_potential(const ExperimentSpec& spec) {
  return PotentialField(experiment_domain(spec), spec.xi, spec.w, spec.seed);
}

struct Solved {
  ScfResult result;
  bool ok = false;
  std::string failure;
};

// Solver failures become a partial result plus a message instead of an exception.
Solved solve_quietly(const HamiltonianMatrix& h, const InteractionKernel& kernel,
                     const LatticeBox& box, const ScfConfig& config) {
  Solved out;
  try {
    out.result = solve(h, kernel, box, config);
    out.ok = true;
  } catch (const MaxIterExceeded& e) {
    out.result = e.partial();
    out.failure = e.what();
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

void mark(ResultTable& table, const std::string& experiment, bool ok, const std::string& failure) {
  table.set_metadata("experiment", experiment);
  table.set_metadata("status", ok ? "ok" : "failed");
  if (!ok) table.set_metadata("failure", failure);
}

std::vector<Spread> spreads_of(const LatticeBox& box, const EigenSystem& eigen) {
  std::vector<Spread> out;
  out.reserve(static_cast<std::size_t>(eigen.vectors.cols()));
  for (Eigen::Index k = 0; k < eigen.vectors.cols(); ++k) {
    out.push_back(eigenvector_spread(box, eigen.vectors.col(k)));
  }
  return out;
}

double median_stddev(const std::vector<Spread>& spreads) {
  std::vector<double> values;
  for (const auto& s : spreads) values.push_back(s.stddev);
  return values.empty() ? 0.0 : stats::median(std::move(values));
}

}  // namespace

std::string to_string(FillingRule rule) { return rule == FillingRule::half ? "half" : "quarter"; }

std::string to_string(MuRule rule) {
  switch (rule) {
    case MuRule::mid_gap:
      return "mid-gap";
    case MuRule::aufbau:
      return "aufbau";
    case MuRule::fixed:
      return "fixed";
  }
  return "mid-gap";
}

void validate(const ExperimentSpec& spec) {
  if (spec.L < 2) throw InvalidArgument("L must be >= 2");
  if (spec.d < 1) throw InvalidArgument("d must be >= 1");
  if (spec.samples < 1) throw InvalidArgument("samples must be >= 1");
  if (!(spec.xi >= 0.0)) throw InvalidArgument("xi must be >= 0");
  if (!(spec.w >= 0.0)) throw InvalidArgument("w must be >= 0");
  if (!(spec.q >= 0.0)) throw InvalidArgument("q must be >= 0");
  if (!(spec.tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (spec.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
}

LatticeBox experiment_domain(const ExperimentSpec& spec) {
  return LatticeBox(std::vector<Index>(static_cast<std::size_t>(spec.d), spec.L));
}

Eigen::Index filling_count(const ExperimentSpec& spec) {
  const Index n = experiment_domain(spec).size();
  return spec.filling == FillingRule::half ? n / 2 : n / 4;
}

ScfConfig scf_config(const ExperimentSpec& spec) {
  ScfConfig config;
  config.tol = spec.tol;
  config.max_iter = spec.max_iter;
  config.algorithm = spec.algorithm;
  config.oda_fallback = spec.oda_fallback;
  switch (spec.mu_rule) {
    case MuRule::mid_gap:
      config.mu_policy = MuPolicy::mid_gap_of_linear();
      break;
    case MuRule::aufbau:
      config.mu_policy = MuPolicy::particle_count(filling_count(spec));
      break;
    case MuRule::fixed:
      config.mu_policy = MuPolicy::fixed(spec.mu);
      break;
  }
  return config;
}

PotentialField member_potential(const ExperimentSpec& spec, std::uint64_t member) {
  return PotentialField(experiment_domain(spec), spec.xi, spec.w, member_seed(spec.seed, member));
}

Spread eigenvector_spread(const LatticeBox& box, const Eigen::VectorXd& psi) {
  if (psi.size() != box.size()) throw DimensionMismatch("eigenvector does not match the box");
  const double norm = psi.squaredNorm();
  if (!(norm > 0.0)) throw InvalidArgument("zero vector has no spread");
  const auto d = static_cast<std::size_t>(box.dimension());
  std::vector<double> mean(d, 0.0);
  Spread spread;
  for (Index x = 0; x < box.size(); ++x) {
    const double p = psi[x] * psi[x] / norm;
    const auto c = box.coordinates(x);
    for (std::size_t a = 0; a < d; ++a) mean[a] += static_cast<double>(c[a]) * p;
    spread.ipr += p * p;
  }
  double variance = 0.0;
  for (Index x = 0; x < box.size(); ++x) {
    const double p = psi[x] * psi[x] / norm;
    const auto c = box.coordinates(x);
    for (std::size_t a = 0; a < d; ++a) {
      const double dx = static_cast<double>(c[a]) - mean[a];
      variance += dx * dx * p;
    }
  }
  spread.stddev = std::sqrt(std::max(variance, 0.0));
  return spread;
}

double uniform_spread(Index length) {
  const double l = static_cast<double>(length);
  return std::sqrt((l * l - 1.0) / 12.0);
}

ConvergenceOutcome convergence_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto box = experiment_domain(spec);
  const auto h = build_hamiltonian(box, run_potential(spec));
  const auto kernel = InteractionKernel::next_nearest(spec.q);
  auto solved = solve_quietly(h, kernel, box, scf_config(spec));

  ConvergenceOutcome out;
  out.table = ResultTable({{"iteration", "1", "SCF iteration n"},
                           {"residual", "1", "operator norm of gamma_{n+1} - gamma_n"},
                           {"energy", "energy", "Hartree-Fock energy after the step"}});
  std::vector<double> xs, ys;
  for (const auto& record : solved.result.trace) {
    out.table.add_row({static_cast<double>(record.iteration), record.residual, record.energy});
    if (record.residual > 0.0 && std::isfinite(record.residual)) {
      xs.push_back(record.iteration);
      ys.push_back(std::log(record.residual));
    }
  }
  if (xs.size() >= 2) {
    const auto fit = stats::linear_fit(xs, ys);
    out.slope = fit.slope;
    out.r_squared = fit.r_squared;
    out.ratio = std::exp(fit.slope);
  }
  out.ok = solved.ok;
  out.failure = solved.failure;
  mark(out.table, "converge", out.ok, out.failure);
  out.table.set_metadata("result.algorithm", to_string(solved.result.algorithm));
  out.table.set_metadata("result.converged", solved.result.converged ? "true" : "false");
  out.table.set_metadata("result.particles", format_integer(static_cast<std::size_t>(solved.result.filling.particles)));
  out.table.set_metadata("result.trace", solved.result.gamma.trace());
  out.table.set_metadata("result.log_residual_slope", out.slope);
  out.table.set_metadata("result.log_residual_r_squared", out.r_squared);
  out.table.set_metadata("result.ratio", out.ratio);
  out.result = std::move(solved.result);
  return out;
}

LocalityOutcome locality_experiment(const ExperimentSpec& spec, Index site, double amplitude) {
  validate(spec);
  const auto box = experiment_domain(spec);
  if (site < 0 || site >= box.size()) throw InvalidArgument("perturbation site outside the domain");
  const auto kernel = InteractionKernel::next_nearest(spec.q);
  const auto potential = run_potential(spec);
  const auto h0 = build_hamiltonian(box, potential);

  LocalityOutcome out;
  out.site = site;
  out.requested_amplitude = amplitude;
  const double current = potential.random_part()[site];
  out.amplitude = std::clamp(current + amplitude, 0.0, spec.w) - current;

  auto config = scf_config(spec);
  config.tol = std::min(config.tol, kLocalityTol);
  out.table = ResultTable({{"x", "site", "lattice site index"},
                           {"delta_density", "1", "gamma_min(V + dV)(x,x) - gamma_min(V)(x,x)"},
                           {"distance", "sites", "l1 distance |x - s| to the perturbed site"}});

  std::string failure;
  try {
    // Both solves share the particle number of the unperturbed linear model.
    const auto filling = resolve_filling(eig_symmetric(h0), config.mu_policy);
    if (config.mu_policy.kind != MuPolicy::Kind::fixed) {
      config.mu_policy = MuPolicy::particle_count(filling.particles);
    }
    const auto base = solve(h0, kernel, box, config);
    const auto perturbed =
        solve(build_hamiltonian(box, potential.with_random_shift(site, out.amplitude)), kernel, box, config);
    std::vector<double> distances, magnitudes;
    double peak = 0.0;
    double far = 0.0;
    for (Index x = 0; x < box.size(); ++x) {
      const double delta = perturbed.gamma(x, x) - base.gamma(x, x);
      const auto distance = static_cast<double>(box.l1_distance(x, site));
      out.delta_density.push_back(delta);
      out.table.add_row({static_cast<double>(x), delta, distance});
      distances.push_back(distance);
      magnitudes.push_back(std::abs(delta));
      out.sum += delta;
      peak = std::max(peak, std::abs(delta));
      if (distance >= 100.0) far = std::max(far, std::abs(delta));
    }
    // Entries of the converged projectors are accurate to about tol.
    out.fit = fit_exponential_decay(distances, magnitudes, 5.0, config.tol);
    if (peak == 0.0) {
      out.decades_at_100 = 0.0;
    } else if (far == 0.0) {
      out.decades_at_100 = std::numeric_limits<double>::infinity();
    } else {
      out.decades_at_100 = std::log10(peak / far);
    }
    out.ok = true;
  } catch (const Error& e) {
    failure = e.what();
  }
  out.failure = failure;
  mark(out.table, "locality", out.ok, out.failure);
  out.table.set_metadata("result.site", format_integer(static_cast<std::size_t>(site)));
  out.table.set_metadata("result.requested_amplitude", amplitude);
  out.table.set_metadata("result.amplitude", out.amplitude);
  out.table.set_metadata("result.tol", config.tol);
  out.table.set_metadata("result.fit_rate", out.fit.rate);
  out.table.set_metadata("result.fit_amplitude", out.fit.amplitude);
  out.table.set_metadata("result.fit_r_squared", out.fit.r_squared);
  out.table.set_metadata("result.decades_at_100", out.decades_at_100);
  out.table.set_metadata("result.sum", out.sum);
  return out;
}

WegnerOutcome wegner_experiment(const ExperimentSpec& spec, double lambda0,
                                const std::vector<double>& epsilons) {
  validate(spec);
  if (epsilons.empty()) throw InvalidArgument("wegner needs at least one epsilon");
  for (double e : epsilons) {
    if (!(e >= 0.0)) throw InvalidArgument("epsilons must be >= 0");
  }
  const auto box = experiment_domain(spec);
  const auto kernel = InteractionKernel::next_nearest(spec.q);
  const auto config = scf_config(spec);
  const double widest = *std::max_element(epsilons.begin(), epsilons.end());

  struct Member {
    bool ok = false;
    std::vector<double> counts;
    double gap_lower = 0.0;
    double gap_upper = 0.0;
    bool in_gap = false;
  };
  std::vector<Member> members(spec.samples);
  parallel_for(spec.samples, [&](std::size_t i) {
    const auto h = build_hamiltonian(box, member_potential(spec, i));
    auto solved = solve_quietly(h, kernel, box, config);
    if (!solved.ok) return;
    const auto values = symmetric_eigenvalues(solved.result.h_min.values);
    Member& m = members[i];
    for (double e : epsilons) {
      double count = 0.0;
      for (Eigen::Index k = 0; k < values.size(); ++k) {
        count += (values[k] >= lambda0 && values[k] <= lambda0 + e) ? 1.0 : 0.0;
      }
      m.counts.push_back(count);
    }
    const Eigen::Index n = solved.result.filling.particles;
    if (n > 0 && n < values.size()) {
      m.gap_lower = values[n - 1];
      m.gap_upper = values[n];
      m.in_gap = lambda0 > m.gap_lower && lambda0 + widest < m.gap_upper;
    }
    m.ok = true;
  });

  WegnerOutcome out;
  out.epsilons = epsilons;
  std::vector<std::vector<double>> per_epsilon(epsilons.size());
  double in_gap = 0.0;
  for (const auto& m : members) {
    if (!m.ok) {
      ++out.skipped_samples;
      continue;
    }
    ++out.used_samples;
    for (std::size_t k = 0; k < epsilons.size(); ++k) per_epsilon[k].push_back(m.counts[k]);
    out.mean_gap_lower += m.gap_lower;
    out.mean_gap_upper += m.gap_upper;
    in_gap += m.in_gap ? 1.0 : 0.0;
  }
  out.table = ResultTable({{"epsilon", "energy", "window width"},
                           {"mean_count", "1", "ensemble mean of #{eigenvalues of H_min in [lambda0, lambda0 + epsilon]}"},
                           {"stderr", "1", "standard error of the mean count"}});
  out.ok = out.used_samples > 0;
  if (out.ok) {
    const double used = static_cast<double>(out.used_samples);
    out.mean_gap_lower /= used;
    out.mean_gap_upper /= used;
    out.lambda0_in_gap_fraction = in_gap / used;
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
      const double mean = stats::mean(per_epsilon[k]);
      const double se = per_epsilon[k].size() > 1 ? stats::standard_error(per_epsilon[k]) : 0.0;
      out.mean_counts.push_back(mean);
      out.standard_errors.push_back(se);
      out.table.add_row({epsilons[k], mean, se});
    }
    std::vector<double> roots;
    for (double e : epsilons) roots.push_back(std::sqrt(e));
    out.linear = stats::proportional_fit(epsilons, out.mean_counts);
    out.square_root = stats::proportional_fit(roots, out.mean_counts);
    out.linear_preferred = out.linear.aic < out.square_root.aic;
  } else {
    out.failure = "every ensemble member failed to converge";
  }
  mark(out.table, "wegner", out.ok, out.failure);
  out.table.set_metadata("result.lambda0", lambda0);
  out.table.set_metadata("result.used_samples", format_integer(out.used_samples));
  out.table.set_metadata("result.skipped_samples", format_integer(out.skipped_samples));
  out.table.set_metadata("result.aic_linear", out.linear.aic);
  out.table.set_metadata("result.aic_sqrt", out.square_root.aic);
  out.table.set_metadata("result.linear_preferred", out.linear_preferred ? "true" : "false");
  out.table.set_metadata("result.lambda0_in_gap_fraction", out.lambda0_in_gap_fraction);
  out.table.set_metadata("result.mean_gap_lower", out.mean_gap_lower);
  out.table.set_metadata("result.mean_gap_upper", out.mean_gap_upper);
  return out;
}

LocalisationOutcome localisation_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto box = experiment_domain(spec);
  const auto h = build_hamiltonian(box, run_potential(spec));
  auto solved = solve_quietly(h, InteractionKernel::next_nearest(spec.q), box, scf_config(spec));

  LocalisationOutcome out;
  out.table = ResultTable({{"eigenvalue", "energy", "eigenvalue of H_min"},
                           {"stddev", "sites", kStddevDefinition},
                           {"ipr", "1", "inverse participation ratio sum_x p(x)^2"}});
  out.ok = solved.ok;
  out.failure = solved.failure;
  out.delocalised_benchmark = uniform_spread(spec.L);
  if (solved.result.h_min.size() == box.size()) {
    const auto eigen = eig_symmetric(solved.result.h_min);
    out.eigenvalues = eigen.values;
    out.spreads = spreads_of(box, eigen);
    for (std::size_t k = 0; k < out.spreads.size(); ++k) {
      out.table.add_row({eigen.values[static_cast<Eigen::Index>(k)], out.spreads[k].stddev, out.spreads[k].ipr});
    }
    out.median_stddev = median_stddev(out.spreads);
  }
  mark(out.table, "localisation", out.ok, out.failure);
  out.table.set_metadata("definition.stddev", kStddevDefinition);
  out.table.set_metadata("result.median_stddev", out.median_stddev);
  out.table.set_metadata("result.delocalised_benchmark", out.delocalised_benchmark);
  return out;
}

std::vector<GapScenario> default_gap_scenarios() {
  return {{"xi2_w3_q2", 2.0, 3.0, 2.0, FillingRule::half},
          {"xi2_w3_q7", 2.0, 3.0, 7.0, FillingRule::half},
          {"xi0_w4_q4_quarter", 0.0, 4.0, 4.0, FillingRule::quarter}};
}

GapClosingOutcome gap_closing_experiment(const ExperimentSpec& spec,
                                         const std::vector<GapScenario>& scenarios) {
  validate(spec);
  GapClosingOutcome out;
  out.table = ResultTable({{"scenario", "1", "index into the scenario list"},
                           {"eigenvalue", "energy", "eigenvalue of H_min"},
                           {"stddev", "sites", kStddevDefinition},
                           {"ipr", "1", "inverse participation ratio sum_x p(x)^2"}});
  out.ok = true;
  for (std::size_t index = 0; index < scenarios.size(); ++index) {
    const auto& scenario = scenarios[index];
    ExperimentSpec variant = spec;
    variant.xi = scenario.xi;
    variant.w = scenario.w;
    variant.q = scenario.q;
    variant.filling = scenario.filling;
    variant.mu_rule = MuRule::aufbau;
    variant.algorithm = Algorithm::oda;
    const auto box = experiment_domain(variant);
    const auto kernel = InteractionKernel::next_nearest(variant.q);
    const auto h = build_hamiltonian(box, run_potential(variant));
    const auto config = scf_config(variant);

    GapScenarioOutcome s;
    s.scenario = scenario;
    auto solved = solve_quietly(h, kernel, box, config);
    s.converged = solved.ok;
    s.failure = solved.failure;
    if (solved.result.h_min.size() == box.size()) {
      const auto& result = solved.result;
      s.iterations = result.iterations;
      s.mu = result.mu;
      s.energy_monotone = true;
      for (std::size_t k = 1; k < result.trace.size(); ++k) {
        const double rise = result.trace[k].energy - result.trace[k - 1].energy;
        s.worst_energy_increase = k == 1 ? rise : std::max(s.worst_energy_increase, rise);
        if (rise > 1e-10 * std::max(1.0, std::abs(result.trace[k - 1].energy))) s.energy_monotone = false;
      }
      const Eigen::Index n_occ = result.filling.particles;
      s.final_residual = operator_norm(
          aufbau_map(result.gamma, h, kernel, box, n_occ).matrix() - result.gamma.matrix());

      const auto eigen = eig_symmetric(result.h_min);
      const Eigen::Index n = eigen.values.size();
      s.eigenvalues = eigen.values;
      s.spectral_width = eigen.values[n - 1] - eigen.values[0];
      s.gap_at_mu = (n_occ > 0 && n_occ < n) ? eigen.values[n_occ] - eigen.values[n_occ - 1] : 0.0;
      s.gap_survives = s.gap_at_mu >= kGapFlagFraction * s.spectral_width;
      s.spreads = spreads_of(box, eigen);
      s.median_stddev = median_stddev(s.spreads);

      double mid = 0.0;
      for (Eigen::Index k = n / 4; k < 3 * n / 4; ++k) mid += s.spreads[static_cast<std::size_t>(k)].stddev;
      s.mid_spectrum_stddev = mid / static_cast<double>(3 * n / 4 - n / 4);

      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(eigen.values[a] - s.mu) < std::abs(eigen.values[b] - s.mu);
      });
      const std::size_t window = std::min<std::size_t>(kBumpWindow, order.size());
      double near = 0.0;
      for (std::size_t k = 0; k < window; ++k) near += s.spreads[static_cast<std::size_t>(order[k])].stddev;
      s.bump_statistic = s.median_stddev > 0.0 ? near / static_cast<double>(window) / s.median_stddev : 0.0;

      for (Eigen::Index k = 0; k < n; ++k) {
        out.table.add_row({static_cast<double>(index), eigen.values[k],
                           s.spreads[static_cast<std::size_t>(k)].stddev,
                           s.spreads[static_cast<std::size_t>(k)].ipr});
      }
    }
    out.ok = out.ok && s.converged;

    const std::string prefix = "scenario." + std::to_string(index) + ".";
    out.table.set_metadata(prefix + "name", scenario.name);
    out.table.set_metadata(prefix + "xi", scenario.xi);
    out.table.set_metadata(prefix + "w", scenario.w);
    out.table.set_metadata(prefix + "q", scenario.q);
    out.table.set_metadata(prefix + "filling", to_string(scenario.filling));
    out.table.set_metadata(prefix + "status", s.converged ? "ok" : "failed");
    if (!s.converged) out.table.set_metadata(prefix + "failure", s.failure);
    out.table.set_metadata(prefix + "iterations", format_integer(static_cast<std::size_t>(s.iterations)));
    out.table.set_metadata(prefix + "mu", s.mu);
    out.table.set_metadata(prefix + "gap_at_mu", s.gap_at_mu);
    out.table.set_metadata(prefix + "spectral_width", s.spectral_width);
    out.table.set_metadata(prefix + "gap_survives", s.gap_survives ? "true" : "false");
    out.table.set_metadata(prefix + "energy_monotone", s.energy_monotone ? "true" : "false");
    out.table.set_metadata(prefix + "final_residual", s.final_residual);
    out.table.set_metadata(prefix + "median_stddev", s.median_stddev);
    out.table.set_metadata(prefix + "mid_spectrum_stddev", s.mid_spectrum_stddev);
    out.table.set_metadata(prefix + "bump_statistic", s.bump_statistic);
    out.scenarios.push_back(std::move(s));
  }
  mark(out.table, "gap-closing", out.ok, "at least one scenario did not converge");
  out.table.set_metadata("definition.stddev", kStddevDefinition);
  out.table.set_metadata("definition.gap_survives",
                         "lambda_{N+1} - lambda_N of H_min >= 0.1 x spectral width");
  out.table.set_metadata("definition.bump_statistic",
                         "mean stddev of the 10 eigenvectors closest to mu / median stddev");
  out.table.set_metadata("reference.fermi_level", 3.5);
  return out;
}

PeriodicSweepOutcome periodic_sweep(const ExperimentSpec& spec, const std::vector<double>& xi_values) {
  validate(spec);
  if (spec.q != 0.0) throw InvalidArgument("the periodic sweep is defined for q = 0 only");
  if (xi_values.empty()) throw InvalidArgument("periodic sweep needs at least one xi");
  const auto box = experiment_domain(spec);
  const std::size_t members = spec.samples;
  std::vector<double> averages(xi_values.size() * members);
  parallel_for(averages.size(), [&](std::size_t job) {
    ExperimentSpec variant = spec;
    variant.xi = xi_values[job / members];
    const auto h = build_hamiltonian(box, member_potential(variant, job % members));
    const auto spreads = spreads_of(box, eig_symmetric(h));
    double sum = 0.0;
    for (const auto& s : spreads) sum += s.stddev;
    averages[job] = sum / static_cast<double>(spreads.size());
  });

  PeriodicSweepOutcome out;
  out.xi_values = xi_values;
  out.table = ResultTable({{"xi", "energy", "periodic amplitude"},
                           {"mean_stddev", "sites", "ensemble mean of the average eigenvector stddev"},
                           {"stderr", "sites", "standard error over the ensemble"}});
  for (std::size_t k = 0; k < xi_values.size(); ++k) {
    const std::span<const double> block(averages.data() + k * members, members);
    const double mean = stats::mean(block);
    const double se = members > 1 ? stats::standard_error(block) : 0.0;
    out.mean_stddev.push_back(mean);
    out.standard_errors.push_back(se);
    out.table.add_row({xi_values[k], mean, se});
  }
  if (xi_values.size() >= 2) {
    out.spearman_rho = stats::spearman(xi_values, out.mean_stddev);
    out.p_value = stats::spearman_p_value(xi_values, out.mean_stddev, true);
  }
  out.ok = true;
  mark(out.table, "sweep-periodic", out.ok, out.failure);
  out.table.set_metadata("definition.stddev", kStddevDefinition);
  out.table.set_metadata("result.spearman_rho", out.spearman_rho);
  out.table.set_metadata("result.p_value_rho_negative", out.p_value);
  return out;
}

MultiscaleOutcome multiscale_probe(const ExperimentSpec& spec, const MultiscaleKnobs& knobs) {
  validate(spec);
  if (spec.d != 1) throw InvalidArgument("the multiscale probe runs on chains (d = 1)");
  if (spec.samples < 2) throw InvalidArgument("the multiscale probe needs samples >= 2");
  if (knobs.radii.empty()) throw InvalidArgument("the multiscale probe needs at least one radius");
  EnsembleModel model;
  model.xi = spec.xi;
  model.w = spec.w;
  model.q = spec.q;
  model.margin = knobs.margin;
  model.constants = knobs.constants;
  model.scf = scf_config(spec);

  MultiscaleOutcome out;
  out.table = ResultTable({{"radius", "sites", "box radius L"},
                           {"estimate", "1", "frequency of both boxes being good"},
                           {"stderr", "1", "binomial standard error"},
                           {"resonant_boxes", "1", "resonant boxes over all samples"},
                           {"failed_solves", "1", "samples with a solver failure"}});
  for (Index radius : knobs.radii) {
    const auto estimate =
        good_box_probability(knobs.lambda, radius, knobs.zeta_box, spec.samples, spec.seed, model);
    out.table.add_row({static_cast<double>(radius), estimate.estimate, estimate.standard_error,
                       static_cast<double>(estimate.resonant_boxes), static_cast<double>(estimate.failed_solves)});
    out.estimates.push_back(estimate);
  }
  out.ok = true;
  mark(out.table, "multiscale-probe", out.ok, "");
  out.table.set_metadata("result.lambda", knobs.lambda);
  out.table.set_metadata("result.zeta_box", knobs.zeta_box);
  out.table.set_metadata("result.D", knobs.constants.D);
  out.table.set_metadata("result.nu", knobs.constants.nu);
  out.table.set_metadata("definition.good_box", "A_c = 0; probes x in Lambda_{floor(sqrt L)}(n), y on the exterior shell");
  return out;
}

VerifyOutcome verify_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto box = experiment_domain(spec);
  const auto kernel = InteractionKernel::next_nearest(spec.q);
  const auto h = build_hamiltonian(box, run_potential(spec));
  auto solved = solve_quietly(h, kernel, box, scf_config(spec));

  VerifyOutcome out;
  out.table = ResultTable({{"idempotency", "1", "|gamma^2 - gamma|"},
                           {"commutator", "energy", "|[gamma, H_min]|"},
                           {"relative_commutator", "1", "|[gamma, H_min]| / |H_min|"},
                           {"fixed_point_residual", "1", "|F(gamma) - gamma|"},
                           {"trace", "1", "Tr gamma"},
                           {"trace_integrality", "1", "|Tr gamma - round(Tr gamma)|"},
                           {"gap", "energy", "lambda_{N+1} - lambda_N of H_min"},
                           {"mu", "energy", "chemical potential"},
                           {"min_energy_change", "energy", "smallest energy change under sampled rotations"}});
  if (solved.ok) {
    VerifyOptions options;
    options.seed = spec.seed;
    out.report = verify_solution(solved.result, h, kernel, box, options);
    const auto& r = out.report;
    out.table.add_row({r.idempotency, r.commutator, r.relative_commutator, r.fixed_point_residual, r.trace,
                       r.trace_integrality, r.gap, r.mu, r.min_energy_change});
    out.ok = r.passed();
    std::string joined;
    for (const auto& f : r.failures) joined += (joined.empty() ? "" : "; ") + f;
    out.failure = joined;
  } else {
    out.failure = solved.failure;
  }
  mark(out.table, "verify", out.ok, out.failure);
  return out;
}

}  // namespace hfa
