#include "hfa/lattice.hpp"

#include <cstdlib>

#include "hfa/errors.hpp"

namespace hfa {

LatticeBox::LatticeBox(std::vector<Index> sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw InvalidArgument("lattice box needs at least one axis");
  strides_.assign(sides_.size(), 1);
  size_ = 1;
  for (std::size_t axis = sides_.size(); axis-- > 0;) {
    if (sides_[axis] <= 0) throw InvalidArgument("lattice box side lengths must be positive");
    strides_[axis] = size_;
    size_ *= sides_[axis];
  }
}

LatticeBox LatticeBox::chain(Index length) { return LatticeBox({length}); }

Index LatticeBox::index(const Coordinates& site) const {
  if (!contains(site)) throw InvalidArgument("site outside lattice box");
  Index idx = 0;
  for (std::size_t axis = 0; axis < sides_.size(); ++axis) idx += site[axis] * strides_[axis];
  return idx;
}

Coordinates LatticeBox::coordinates(Index index) const {
  if (index < 0 || index >= size_) throw InvalidArgument("site index out of range");
  Coordinates site(sides_.size());
  for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
    site[axis] = index / strides_[axis];
    index %= strides_[axis];
  }
  return site;
}

bool LatticeBox::contains(const Coordinates& site) const {
  if (site.size() != sides_.size()) return false;
  for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
    if (site[axis] < 0 || site[axis] >= sides_[axis]) return false;
  }
  return true;
}

Index LatticeBox::l1_distance(Index i, Index j) const {
  if (sides_.size() == 1) return std::abs(i - j);
  const auto a = coordinates(i);
  const auto b = coordinates(j);
  Index d = 0;
  for (std::size_t axis = 0; axis < a.size(); ++axis) d += std::abs(a[axis] - b[axis]);
  return d;
}

Index LatticeBox::linf_distance(Index i, Index j) const {
  if (sides_.size() == 1) return std::abs(i - j);
  const auto a = coordinates(i);
  const auto b = coordinates(j);
  Index d = 0;
  for (std::size_t axis = 0; axis < a.size(); ++axis) d = std::max(d, std::abs(a[axis] - b[axis]));
  return d;
}

std::vector<Index> LatticeBox::neighbours(Index i) const {
  std::vector<Index> out;
  auto site = coordinates(i);
  for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
    for (Index step : {Index{-1}, Index{1}}) {
      site[axis] += step;
      if (contains(site)) out.push_back(index(site));
      site[axis] -= step;
    }
  }
  return out;
}

Index lattice_shell_count(int dimension, Index r) {
  if (r < 0) return 0;
  if (r == 0) return 1;
  // count(d, r) = sum_k 2^k C(d,k) C(r-1,k-1), k nonzero coordinates
  auto binomial = [](Index n, Index k) -> Index {
    if (k < 0 || k > n) return 0;
    Index result = 1;
    for (Index i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
  };
  Index total = 0;
  for (Index k = 1; k <= dimension; ++k) {
    total += (Index{1} << k) * binomial(dimension, k) * binomial(r - 1, k - 1);
  }
  return total;
}

}  // namespace hfa
