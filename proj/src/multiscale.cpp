#include "hfa/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "hfa/errors.hpp"
#include "hfa/parallel.hpp"
#include "hfa/stats.hpp"

namespace hfa {
namespace {

Index linf_to_center(const LatticeBox& domain, const Coordinates& center, Index site) {
  if (static_cast<int>(center.size()) != domain.dimension()) {
    throw DimensionMismatch("box center dimension differs from the domain");
  }
  const auto coords = domain.coordinates(site);
  Index d = 0;
  for (std::size_t axis = 0; axis < coords.size(); ++axis) {
    d = std::max(d, std::abs(coords[axis] - center[axis]));
  }
  return d;
}

double distance_to_spectrum(const Eigen::VectorXd& spectrum, std::complex<double> lambda) {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) d = std::min(d, std::abs(spectrum[k] - lambda));
  return d;
}

Eigen::MatrixXcd resolvent(const Eigen::MatrixXd& k, std::complex<double> lambda) {
  if (distance_to_spectrum(symmetric_eigenvalues(k), lambda) <= 1e-10) {
    throw ResolventSingular("lambda lies on the spectrum");
  }
  Eigen::MatrixXcd shifted = k.cast<std::complex<double>>();
  shifted.diagonal().array() -= lambda;
  return shifted.partialPivLu().inverse();
}

struct Partition {
  std::vector<Index> inside;
  std::vector<Index> outside;
};

Partition partition(const LatticeBox& domain, const Box& box, Index size) {
  if (size != domain.size()) throw DimensionMismatch("operator does not match the domain");
  Partition p{box.sites(domain), box.complement(domain)};
  if (p.inside.empty()) throw InvalidArgument("box does not intersect the domain");
  return p;
}

// Residual matrix over (x in box) x (y outside).
Eigen::MatrixXcd resolvent_residuals(const HamiltonianMatrix& k, const Partition& p,
                                     std::complex<double> lambda) {
  const Eigen::MatrixXcd full = resolvent(k.values, lambda);
  const Eigen::MatrixXcd local = resolvent(restrict(k, p.inside).values, lambda);
  const auto ni = static_cast<Eigen::Index>(p.inside.size());
  const auto no = static_cast<Eigen::Index>(p.outside.size());
  Eigen::MatrixXcd border(ni, no);
  Eigen::MatrixXcd full_in_out(ni, no);
  Eigen::MatrixXcd full_out_out(no, no);
  for (Eigen::Index a = 0; a < ni; ++a) {
    for (Eigen::Index b = 0; b < no; ++b) {
      border(a, b) = k.values(p.inside[a], p.outside[b]);
      full_in_out(a, b) = full(p.inside[a], p.outside[b]);
    }
  }
  for (Eigen::Index a = 0; a < no; ++a) {
    for (Eigen::Index b = 0; b < no; ++b) full_out_out(a, b) = full(p.outside[a], p.outside[b]);
  }
  return full_in_out + local * border * full_out_out;
}

}  // namespace

bool Box::contains(const LatticeBox& domain, Index site) const {
  return linf_to_center(domain, center, site) <= radius;
}

std::vector<Index> Box::sites(const LatticeBox& domain) const {
  std::vector<Index> out;
  for (Index i = 0; i < domain.size(); ++i) {
    if (contains(domain, i)) out.push_back(i);
  }
  return out;
}

std::vector<Index> Box::complement(const LatticeBox& domain) const {
  std::vector<Index> out;
  for (Index i = 0; i < domain.size(); ++i) {
    if (!contains(domain, i)) out.push_back(i);
  }
  return out;
}

HamiltonianMatrix restrict(const HamiltonianMatrix& k, std::span<const Index> sites) {
  if (sites.empty()) throw InvalidArgument("cannot restrict to an empty set of sites");
  const auto n = static_cast<Eigen::Index>(sites.size());
  HamiltonianMatrix out{Eigen::MatrixXd(n, n), k.kind};
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) out.values(a, b) = k.values(sites[a], sites[b]);
  }
  return out;
}

HamiltonianMatrix restrict(const HamiltonianMatrix& k, const LatticeBox& domain, const Box& box) {
  return restrict(k, partition(domain, box, k.size()).inside);
}

Eigen::SparseMatrix<double> border_operator(const HamiltonianMatrix& k, const LatticeBox& domain,
                                            const Box& box) {
  const auto p = partition(domain, box, k.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (Index x : p.inside) {
    for (Index y : p.outside) {
      if (k.values(x, y) != 0.0) entries.emplace_back(x, y, k.values(x, y));
      if (k.values(y, x) != 0.0) entries.emplace_back(y, x, k.values(y, x));
    }
  }
  Eigen::SparseMatrix<double> gamma(k.size(), k.size());
  gamma.setFromTriplets(entries.begin(), entries.end());
  return gamma;
}

double geometric_resolvent_residual(const HamiltonianMatrix& k, const LatticeBox& domain,
                                    const Box& box, std::complex<double> lambda, Index x, Index y) {
  const auto p = partition(domain, box, k.size());
  const auto xi = std::find(p.inside.begin(), p.inside.end(), x);
  const auto yi = std::find(p.outside.begin(), p.outside.end(), y);
  if (xi == p.inside.end()) throw InvalidArgument("x must lie in the box");
  if (yi == p.outside.end()) throw InvalidArgument("y must lie outside the box");
  const auto residuals = resolvent_residuals(k, p, lambda);
  return std::abs(residuals(xi - p.inside.begin(), yi - p.outside.begin()));
}

double max_geometric_resolvent_residual(const HamiltonianMatrix& k, const LatticeBox& domain,
                                        const Box& box, std::complex<double> lambda) {
  const auto p = partition(domain, box, k.size());
  if (p.outside.empty()) return 0.0;
  return resolvent_residuals(k, p, lambda).cwiseAbs().maxCoeff();
}

PotentialField cutoff_potential(const LatticeBox& domain, const PotentialField& potential,
                                const Coordinates& center, Index radius) {
  if (potential.size() != domain.size()) throw DimensionMismatch("potential does not match the domain");
  const Box outer{center, 2 * radius};
  Eigen::VectorXd random = Eigen::VectorXd::Zero(domain.size());
  for (Index site : outer.sites(domain)) random[site] = potential.random_part()[site];
  return PotentialField(potential.periodic_part(), std::move(random), potential.periodic_amplitude(),
                        potential.disorder_width(), potential.seed());
}

HattedHamiltonian hatted_hamiltonian(const Coordinates& center, Index radius,
                                     const ModelInputs& model) {
  if (radius < 1) throw InvalidArgument("box radius must be >= 1");
  const Box outer{center, 2 * radius};
  if (outer.complement(model.domain).size() + outer.sites(model.domain).size() !=
          static_cast<std::size_t>(model.domain.size()) ||
      static_cast<Index>(outer.sites(model.domain).size()) !=
          static_cast<Index>(std::pow(4 * radius + 1, model.domain.dimension()))) {
    throw InvalidArgument("Lambda_2L(n) does not fit inside the sampled domain");
  }
  const auto potential = cutoff_potential(model.domain, model.potential, center, radius);
  const auto h_linear = build_hamiltonian(model.domain, potential);

  HattedHamiltonian hat;
  hat.box = Box{center, radius};
  hat.sites = hat.box.sites(model.domain);
  hat.solution = solve(h_linear, model.kernel, model.domain, model.scf);
  hat.ambient = hat.solution.h_min;
  hat.local = restrict(hat.ambient, hat.sites);
  return hat;
}

double resonance_threshold(Index radius, const LocalityConstants& constants) {
  const double l = static_cast<double>(radius);
  return std::exp(-std::sqrt(l)) + 2.0 * constants.D * std::exp(-constants.nu * l);
}

ResonanceVerdict is_resonant(double lambda, const HattedHamiltonian& hat,
                             const LocalityConstants& constants) {
  const double l = static_cast<double>(hat.box.radius);
  ResonanceVerdict verdict;
  verdict.distance = distance_to_spectrum(symmetric_eigenvalues(hat.local.values), lambda);
  verdict.threshold = resonance_threshold(hat.box.radius, constants);
  verdict.margin = verdict.distance - verdict.threshold;
  verdict.inner_margin = verdict.distance - (std::exp(-std::sqrt(l)) -
                                             2.0 * constants.D * std::exp(-constants.nu * l));
  verdict.resonant = verdict.margin <= 0.0;
  return verdict;
}

GoodBoxVerdict good_box_check(double lambda, const HattedHamiltonian& hat, double zeta_box,
                              const LocalityConstants& constants, Index interaction_range,
                              const LatticeBox& domain) {
  GoodBoxVerdict verdict;
  verdict.resonance = is_resonant(lambda, hat, constants);
  if (verdict.resonance.resonant) {
    throw ResonantBox("lambda = " + std::to_string(lambda) + " is resonant for the box");
  }
  const Index range = std::max<Index>(interaction_range, 1);
  const auto inner_radius = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(hat.box.radius))));
  const Box inner{hat.box.center, inner_radius};

  Eigen::MatrixXd shifted = hat.local.values;
  shifted.diagonal().array() -= lambda;
  const Eigen::MatrixXd local_resolvent = shifted.partialPivLu().inverse();

  std::vector<Eigen::Index> probes_x;
  for (std::size_t a = 0; a < hat.sites.size(); ++a) {
    if (inner.contains(domain, hat.sites[a])) probes_x.push_back(static_cast<Eigen::Index>(a));
  }
  std::vector<Index> probes_y;
  for (Index y = 0; y < domain.size(); ++y) {
    const Index d = linf_to_center(domain, hat.box.center, y);
    if (d > hat.box.radius && d <= hat.box.radius + range) probes_y.push_back(y);
  }

  verdict.good = true;
  for (Eigen::Index a : probes_x) {
    const Index x = hat.sites[static_cast<std::size_t>(a)];
    for (Index y : probes_y) {
      double lhs = 0.0;
      for (std::size_t v = 0; v < hat.sites.size(); ++v) {
        lhs += std::abs(local_resolvent(a, static_cast<Eigen::Index>(v))) *
               std::abs(hat.ambient.values(hat.sites[v], y));
      }
      const double bound = std::exp(-zeta_box * static_cast<double>(domain.l1_distance(x, y)));
      verdict.worst_ratio = std::max(verdict.worst_ratio, lhs / bound);
      ++verdict.probes;
      if (lhs > bound) {
        ++verdict.failed_probes;
        verdict.good = false;
      }
    }
  }
  return verdict;
}

BoxClass classify_box(double lambda, const HattedHamiltonian& hat, double zeta_box,
                      const LocalityConstants& constants, Index interaction_range,
                      const LatticeBox& domain) {
  try {
    return good_box_check(lambda, hat, zeta_box, constants, interaction_range, domain).good
               ? BoxClass::good
               : BoxClass::bad;
  } catch (const ResonantBox&) {
    return BoxClass::resonant;
  }
}

ProbabilityEstimate good_box_probability(double lambda, Index radius, double zeta_box,
                                         std::size_t n_samples, std::uint64_t seed,
                                         const EnsembleModel& model) {
  if (n_samples < 2) throw InvalidArgument("good-box probability needs at least two samples");
  if (radius < 1) throw InvalidArgument("box radius must be >= 1");
  const Index first = model.margin + 2 * radius;
  const Index second = first + 4 * radius;
  const LatticeBox domain = LatticeBox::chain(second + 2 * radius + model.margin + 1);
  const auto kernel = InteractionKernel::next_nearest(model.q);

  struct Sample {
    bool both_good = false;
    int resonant = 0;
    bool failed = false;
  };
  std::vector<Sample> samples(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    const PotentialField potential(domain, model.xi, model.w, member_seed(seed, i));
    const ModelInputs inputs{domain, potential, kernel, model.scf};
    Sample& sample = samples[i];
    bool good = true;
    for (Index center : {first, second}) {
      try {
        const auto hat = hatted_hamiltonian({center}, radius, inputs);
        const auto cls = classify_box(lambda, hat, zeta_box, model.constants, kernel.range(), domain);
        if (cls == BoxClass::resonant) ++sample.resonant;
        good = good && cls == BoxClass::good;
      } catch (const Error&) {
        sample.failed = true;
        good = false;
      }
    }
    sample.both_good = good;
  });

  ProbabilityEstimate estimate;
  estimate.samples = n_samples;
  for (const auto& sample : samples) {
    estimate.both_good += sample.both_good ? 1 : 0;
    estimate.resonant_boxes += static_cast<std::size_t>(sample.resonant);
    estimate.failed_solves += sample.failed ? 1 : 0;
  }
  const double n = static_cast<double>(n_samples);
  estimate.estimate = static_cast<double>(estimate.both_good) / n;
  estimate.standard_error = std::sqrt(estimate.estimate * (1.0 - estimate.estimate) / n);
  return estimate;
}

LocalityCalibration calibrate_locality(const ModelInputs& model, const Coordinates& center,
                                       std::span<const Index> radii) {
  const auto full = solve(build_hamiltonian(model.domain, model.potential), model.kernel,
                          model.domain, model.scf);
  LocalityCalibration calibration;
  std::vector<double> xs, ys;
  for (Index radius : radii) {
    const auto hat = hatted_hamiltonian(center, radius, model);
    const auto reference = restrict(full.h_min, hat.sites);
    const double error = operator_norm(reference.values - hat.local.values);
    calibration.radii.push_back(radius);
    calibration.truncation_errors.push_back(error);
    if (error > 0.0) {
      xs.push_back(static_cast<double>(radius));
      ys.push_back(std::log(error));
    }
  }
  if (xs.size() >= 2) {
    const auto fit = stats::linear_fit(xs, ys);
    calibration.constants = {std::exp(fit.intercept), -fit.slope};
    calibration.r_squared = fit.r_squared;
  }
  return calibration;
}

}  // namespace hfa
