#pragma once

#include <cstddef>
#include <vector>

namespace hfa {

using Index = std::ptrdiff_t;
using Coordinates = std::vector<Index>;

/// Finite box of Z^d with open boundaries. Sites are numbered row-major,
/// the last axis varying fastest.
class LatticeBox {
 public:
  explicit LatticeBox(std::vector<Index> sides);

  /// One-dimensional chain 0..length-1.
  static LatticeBox chain(Index length);

  int dimension() const { return static_cast<int>(sides_.size()); }
  const std::vector<Index>& sides() const { return sides_; }
  Index size() const { return size_; }

  Index index(const Coordinates& site) const;
  Coordinates coordinates(Index index) const;
  bool contains(const Coordinates& site) const;

  /// l1 distance between two sites given by index.
  Index l1_distance(Index i, Index j) const;
  Index linf_distance(Index i, Index j) const;
  bool adjacent(Index i, Index j) const { return l1_distance(i, j) == 1; }

  /// Indices of the 2d (or fewer, at the boundary) neighbours of a site.
  std::vector<Index> neighbours(Index i) const;

  bool operator==(const LatticeBox&) const = default;

 private:
  std::vector<Index> sides_;
  std::vector<Index> strides_;
  Index size_ = 0;
};

/// Number of vectors of Z^d with l1 norm exactly r.
Index lattice_shell_count(int dimension, Index r);

}  // namespace hfa
