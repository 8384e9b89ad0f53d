#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bridge.hpp"
#include "hfa/errors.hpp"
#include "hfa/spectral.hpp"
#include "hfa/stats.hpp"
#include "oracles.hpp"

using namespace hfa;

namespace {

HamiltonianMatrix generic(const Eigen::MatrixXd& m) { return {m, OperatorKind::generic}; }

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

HamiltonianMatrix chain_model(Index n, double xi, double w, std::uint64_t seed) {
  const auto box = LatticeBox::chain(n);
  return build_hamiltonian(box, PotentialField(box, xi, w, seed));
}

double commutator_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return operator_norm(a * b - b * a);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("small eigenvalue examples") {
    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    const auto e = eig_symmetric(generic(flip));
    CHECK(e.values(0) == doctest::Approx(-1.0));
    CHECK(e.values(1) == doctest::Approx(1.0));

    const Eigen::MatrixXd diag = Eigen::Vector3d(3, 1, 2).asDiagonal();
    const auto d = eig_symmetric(generic(diag));
    CHECK(d.values(0) == doctest::Approx(1.0));
    CHECK(d.values(1) == doctest::Approx(2.0));
    CHECK(d.values(2) == doctest::Approx(3.0));
  }

  TEST_CASE("random symmetric matrices reconstruct and agree with Jacobi") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto m = oracle::random_symmetric(5, seed);
      const auto e = eig_symmetric(generic(bridge::to_eigen(m)));
      const Eigen::MatrixXd rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
      CHECK((rebuilt - bridge::to_eigen(m)).norm() < 1e-9);
      CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-12);
      const auto jacobi = oracle::jacobi_eigenvalues(m);
      for (int k = 0; k < 5; ++k) CHECK(std::abs(e.values(k) - jacobi[k]) < 1e-10);
    }
  }

  TEST_CASE("non-symmetric input to the eigensolver is rejected") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 2, 0;
    CHECK_THROWS_AS(eig_symmetric(generic(m)), InvalidArgument);
  }

  TEST_CASE("operator norm uses the largest singular value for non-symmetric input") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 3, 0, 0;
    CHECK(operator_norm(m) == doctest::Approx(3.0));
    Eigen::MatrixXd s(2, 2);
    s << -4, 0, 0, 1;
    CHECK(operator_norm(s) == doctest::Approx(4.0));
  }

  TEST_CASE("spectral projector examples") {
    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    const auto p = spectral_projector(generic(flip), 0.0);
    CHECK(p.trace() == doctest::Approx(1.0));
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(p(0, 1) == doctest::Approx(-0.5));
    CHECK(p(1, 1) == doctest::Approx(0.5));
    CHECK(p.is_projector());

    const Eigen::MatrixXd diag = Eigen::Vector2d(-1, 1).asDiagonal();
    const auto q = spectral_projector(generic(diag), 0.0);
    CHECK(q(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(q(1, 1)) < 1e-15);
    CHECK(std::abs(q(0, 1)) < 1e-15);
  }

  TEST_CASE("mu on an eigenvalue is an error") {
    const Eigen::MatrixXd diag = Eigen::Vector2d(-1, 1).asDiagonal();
    CHECK_THROWS_AS(spectral_projector(generic(diag), 1.0), EigenvalueAtMu);
    CHECK_THROWS_AS(spectral_projector(generic(diag), 1.0 + 1e-9), EigenvalueAtMu);
    try {
      spectral_projector(generic(diag), -1.0);
    } catch (const EigenvalueAtMu& e) {
      CHECK(e.eigenvalue() == doctest::Approx(-1.0));
      CHECK(e.mu() == -1.0);
    }
  }

  TEST_CASE("half filling of the linear model at L = 500") {
    const auto h = chain_model(500, 1.0, 1.0, 7);
    const auto eigen = eig_symmetric(h);
    const auto gap = find_gap(as_vector(eigen.values));
    CHECK(gap.band_index == 250);
    const auto p = spectral_projector(eigen, gap.mu());
    CHECK(std::abs(p.trace() - 250.0) < 1e-6);
  }

  TEST_CASE("projector invariants on random models") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto h = chain_model(80, 1.0, 1.0, seed);
      const auto eigen = eig_symmetric(h);
      const auto gap = find_gap(as_vector(eigen.values));
      const auto p = spectral_projector(eigen, gap.mu());
      const auto& g = p.matrix();
      CHECK(operator_norm(g * g - g) <= 1e-8);
      CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(commutator_norm(g, h.values) <= 1e-8 * operator_norm(h.values));
      CHECK(std::abs(p.trace() - std::round(p.trace())) < 1e-6);
    }
  }

  TEST_CASE("offset covariance") {
    const auto h = chain_model(60, 1.0, 1.0, 3);
    const auto gap = find_gap(as_vector(symmetric_eigenvalues(h.values)));
    const auto base = spectral_projector(h, gap.mu());
    for (double c : {-5.0, 0.3, 17.0}) {
      HamiltonianMatrix shifted = h;
      shifted.values.diagonal().array() += c;
      const auto moved = spectral_projector(shifted, gap.mu() + c);
      CHECK((moved.matrix() - base.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("lowest projector fills the requested count") {
    const auto eigen = eig_symmetric(chain_model(20, 1.0, 1.0, 2));
    CHECK(lowest_projector(eigen, 7).trace() == doctest::Approx(7.0));
    CHECK(lowest_projector(eigen, 0).trace() == 0.0);
    CHECK_THROWS(lowest_projector(eigen, 21));
  }

  TEST_CASE("find gap examples") {
    const std::vector<double> values{-2, -1, 3, 4};
    const auto gap = find_gap(values);
    CHECK(gap.lower == -1.0);
    CHECK(gap.upper == 3.0);
    CHECK(gap.width() == 4.0);
    CHECK(gap.mu() == 1.0);
    CHECK(gap.band_index == 2);

    const auto hinted = find_gap(values, 3.5);
    CHECK(hinted.lower == 3.0);
    CHECK(hinted.upper == 4.0);
    CHECK(hinted.band_index == 3);
    CHECK_THROWS_AS(find_gap(values, 10.0), NoGap);

    std::vector<double> even(11);
    std::iota(even.begin(), even.end(), 0.0);
    CHECK_THROWS_AS(find_gap(even, std::nullopt, 1.5), NoGap);
    CHECK_NOTHROW(find_gap(even, std::nullopt, 0.5));
  }

  TEST_CASE("interior gaps are sorted widest first and never overlap a level") {
    const std::vector<double> values{0, 1, 1.5, 4, 4.1, 6};
    const auto gaps = interior_gaps(values, 0.2);
    REQUIRE(gaps.size() == 4);
    CHECK(gaps[0].width() == doctest::Approx(2.5));
    for (std::size_t k = 1; k < gaps.size(); ++k) CHECK(gaps[k - 1].width() >= gaps[k].width());
    for (const auto& g : gaps) {
      for (double v : values) CHECK_FALSE((v > g.lower && v < g.upper));
    }
  }

  TEST_CASE("clean periodic chain has a gap close to 2 xi") {
    for (double xi : {1.0, 2.0}) {
      const auto values = symmetric_eigenvalues(chain_model(500, xi, 0.0, 0).values);
      const auto gap = find_gap(as_vector(values));
      CHECK(std::abs(gap.width() - 2.0 * xi) <= 0.05 * 2.0 * xi);
    }
  }

  TEST_CASE("disordered chain keeps a working gap at xi = w = 1") {
    const auto values = symmetric_eigenvalues(chain_model(500, 1.0, 1.0, 7).values);
    const auto gap = find_gap(as_vector(values));
    CHECK(gap.width() > 0.5);
    CHECK(gap.band_index == 250);
  }

  TEST_CASE("exponential fit recovers an exact exponential") {
    std::vector<double> d;
    std::vector<double> v;
    for (int r = 0; r < 40; ++r) {
      d.push_back(r);
      v.push_back(3.0 * std::exp(-0.7 * r));
    }
    const auto fit = fit_exponential_decay(d, v, 5.0, 0.0);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.rate == doctest::Approx(0.7));
    CHECK(fit.amplitude == doctest::Approx(3.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.points == 35);
  }

  TEST_CASE("diagonal operator: strictly diagonal resolvent, degenerate fit") {
    const auto box = LatticeBox::chain(30);
    const Eigen::MatrixXd diag = Eigen::VectorXd::LinSpaced(30, -3.0, 3.0).asDiagonal();
    std::vector<Eigen::Index> ys(30);
    std::iota(ys.begin(), ys.end(), 0);
    const auto probe = combes_thomas_probe(generic(diag), {0.05, 0.0}, box, 4, ys);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (ys[k] != 4) CHECK(probe.magnitudes[k] == 0.0);
    }
    CHECK(probe.fit.degenerate);
    CHECK(std::isinf(probe.fit.rate));
  }

  TEST_CASE("probe magnitudes agree with the dense inverse oracle") {
    const auto h = chain_model(40, 1.0, 1.0, 4);
    const std::complex<double> lambda{0.2, 0.3};
    const auto inverse = oracle::resolvent(bridge::from_eigen(h.values), lambda);
    std::vector<Eigen::Index> ys(40);
    std::iota(ys.begin(), ys.end(), 0);
    const auto probe = combes_thomas_probe(h, lambda, LatticeBox::chain(40), 11, ys);
    for (std::size_t y = 0; y < ys.size(); ++y) {
      CHECK(std::abs(probe.magnitudes[y] - std::abs(inverse[11][y])) < 1e-12);
    }
  }

  TEST_CASE("mid-gap resolvent decays exponentially") {
    const auto box = LatticeBox::chain(200);
    const auto h = chain_model(200, 1.0, 1.0, 7);
    const auto gap = find_gap(as_vector(symmetric_eigenvalues(h.values)));
    std::vector<Eigen::Index> ys(200);
    std::iota(ys.begin(), ys.end(), 0);
    const auto mid = combes_thomas_probe(h, gap.mu(), box, 100, ys);
    CHECK(mid.fit.rate > 0.0);
    CHECK(mid.fit.r_squared > 0.9);

    const auto values = symmetric_eigenvalues(h.values);
    const auto far = combes_thomas_probe(h, values.maxCoeff() + 10.0, box, 100, ys);
    CHECK(far.fit.rate > 0.0);
  }

  TEST_CASE("decay rate grows as lambda moves into the gap") {
    const auto box = LatticeBox::chain(200);
    const auto h = chain_model(200, 1.0, 1.0, 7);
    const auto gap = find_gap(as_vector(symmetric_eigenvalues(h.values)));
    std::vector<Eigen::Index> ys(200);
    std::iota(ys.begin(), ys.end(), 0);
    std::vector<double> depth;
    std::vector<double> rates;
    for (double f : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      depth.push_back(f);
      rates.push_back(combes_thomas_probe(h, gap.lower + f * gap.width(), box, 100, ys).fit.rate);
    }
    CHECK(stats::spearman(depth, rates) > 0.0);
  }

  TEST_CASE("probe refuses lambda on the spectrum") {
    const Eigen::MatrixXd diag = Eigen::Vector3d(0, 1, 2).asDiagonal();
    const std::vector<Eigen::Index> ys{0, 1, 2};
    CHECK_THROWS_AS(combes_thomas_probe(generic(diag), 1.0, LatticeBox::chain(3), 0, ys),
                    ResolventSingular);
  }
}
