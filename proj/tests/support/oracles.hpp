#pragma once

// Reference computations written with plain loops, sharing no code with the
// library, used as ground truth in the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using CMatrix = std::vector<std::vector<std::complex<double>>>;

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<double>(n, 0.0)); }

/// Chain Hamiltonian: V on the diagonal, 1 between neighbours.
inline Matrix chain_hamiltonian(const std::vector<double>& v) {
  const std::size_t n = v.size();
  Matrix h = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i][i] = v[i];
    if (i + 1 < n) h[i][i + 1] = h[i + 1][i] = 1.0;
  }
  return h;
}

/// Spectrum of the path graph on n vertices, ascending.
inline std::vector<double> path_spectrum(std::size_t n) {
  std::vector<double> out;
  for (std::size_t k = n; k >= 1; --k) {
    out.push_back(2.0 * std::cos(static_cast<double>(k) * M_PI / static_cast<double>(n + 1)));
  }
  return out;
}

/// Next-nearest kernel value at chain distance r.
inline double nnn_kernel(double q, long r) {
  r = std::labs(r);
  if (r == 0) return q;
  if (r == 1) return q / 2.0;
  if (r == 2 || r == 3) return q / 4.0;
  return 0.0;
}

/// A(x,y) = delta_{xy} sum_n W(n-y) g(n,n) - W(x-y) g(x,y) on a chain.
inline Matrix effective_interaction(const Matrix& g, double q) {
  const std::size_t n = g.size();
  Matrix a = zeros(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      double value = 0.0;
      if (x == y) {
        for (std::size_t m = 0; m < n; ++m) {
          value += nnn_kernel(q, static_cast<long>(m) - static_cast<long>(y)) * g[m][m];
        }
      }
      value -= nnn_kernel(q, static_cast<long>(x) - static_cast<long>(y)) * g[x][y];
      a[x][y] = value;
    }
  }
  return a;
}

/// Tr(H g) + 1/2 sum W g(x,x) g(y,y) - 1/2 sum W g(x,y)^2 by explicit sums.
inline double hf_energy(const Matrix& g, const Matrix& h, double q) {
  const std::size_t n = g.size();
  double kinetic = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) kinetic += h[x][y] * g[y][x];
  }
  double hartree = 0.0;
  double exchange = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double w = nnn_kernel(q, static_cast<long>(x) - static_cast<long>(y));
      hartree += w * g[x][x] * g[y][y];
      exchange += w * g[x][y] * g[x][y];
    }
  }
  return kinetic + 0.5 * hartree - 0.5 * exchange;
}

/// Cyclic Jacobi eigenvalue iteration; eigenvalues ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) off += a[p][r] * a[p][r];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        if (std::abs(a[p][r]) < 1e-300) continue;
        const double theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akr = a[k][r];
          a[k][p] = c * akp - s * akr;
          a[k][r] = s * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double ark = a[r][k];
          a[p][k] = c * apk - s * ark;
          a[r][k] = s * apk + c * ark;
        }
      }
    }
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(a[k][k]);
  std::sort(out.begin(), out.end());
  return out;
}

/// Gauss-Jordan inverse with partial pivoting.
inline CMatrix inverse(CMatrix a) {
  const std::size_t n = a.size();
  CMatrix inv(n, std::vector<std::complex<double>>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const auto d = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] /= d;
      inv[col][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const auto f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

/// (K - lambda)^{-1} for a real K.
inline CMatrix resolvent(const Matrix& k, std::complex<double> lambda) {
  const std::size_t n = k.size();
  CMatrix a(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = k[i][j] - (i == j ? lambda : 0.0);
  }
  return inverse(a);
}

/// Projector onto the span of `rank` Gram-Schmidt-orthonormalised random vectors.
inline Matrix random_projector(std::size_t n, std::size_t rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> basis;
  while (basis.size() < rank) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += b[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  Matrix p = zeros(n);
  for (const auto& b : basis) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) p[i][j] += b[i] * b[j];
    }
  }
  return p;
}

inline Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) m[i][j] = m[j][i] = u(rng);
  }
  return m;
}

/// Position standard deviation of |psi|^2 on a chain, two-pass.
inline double chain_spread(const std::vector<double>& psi) {
  double norm = 0.0;
  for (double x : psi) norm += x * x;
  double mean = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) mean += static_cast<double>(i) * psi[i] * psi[i] / norm;
  double var = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = static_cast<double>(i) - mean;
    var += d * d * psi[i] * psi[i] / norm;
  }
  return std::sqrt(var);
}

/// |R(x,y) + sum_{u in box, v outside} R_box(x,u) K(u,v) R(v,y)| with plain-loop
/// inverses; `inside` lists the box sites and x must be one of them.
inline double geometric_residual(const Matrix& k, const std::vector<long>& inside,
                                 std::complex<double> lambda, long x, long y) {
  const auto full = resolvent(k, lambda);
  Matrix local(inside.size(), std::vector<double>(inside.size()));
  for (std::size_t a = 0; a < inside.size(); ++a) {
    for (std::size_t b = 0; b < inside.size(); ++b) local[a][b] = k[inside[a]][inside[b]];
  }
  const auto local_inverse = resolvent(local, lambda);
  std::vector<bool> in_box(k.size(), false);
  for (long s : inside) in_box[static_cast<std::size_t>(s)] = true;
  std::size_t ax = 0;
  while (inside[ax] != x) ++ax;
  std::complex<double> value = full[x][y];
  for (std::size_t u = 0; u < inside.size(); ++u) {
    for (std::size_t v = 0; v < k.size(); ++v) {
      if (in_box[v]) continue;
      value += local_inverse[ax][u] * k[inside[u]][v] * full[v][y];
    }
  }
  return std::abs(value);
}

}  // namespace oracle
