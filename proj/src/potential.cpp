#include "hfa/potential.hpp"

#include "hfa/errors.hpp"

namespace hfa {
namespace {

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double uniform_draw(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = mix(mix(seed) ^ mix(counter + 0x632be59bd9b4e019ULL));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t member_seed(std::uint64_t base_seed, std::uint64_t member) {
  return mix(base_seed ^ mix(member ^ 0xd1b54a32d192ed03ULL));
}

PotentialField::PotentialField(const LatticeBox& box, double periodic_amplitude,
                               double disorder_width, std::uint64_t seed)
    : periodic_amplitude_(periodic_amplitude), disorder_width_(disorder_width), seed_(seed) {
  if (periodic_amplitude < 0.0) throw InvalidArgument("periodic amplitude must be >= 0");
  if (disorder_width < 0.0) throw InvalidArgument("disorder width must be >= 0");
  const Index n = box.size();
  periodic_.resize(n);
  random_.resize(n);
  for (Index i = 0; i < n; ++i) {
    Index parity = 0;
    for (Index c : box.coordinates(i)) parity += c;
    periodic_[i] = (parity % 2 == 0) ? periodic_amplitude : -periodic_amplitude;
    random_[i] = disorder_width * uniform_draw(seed, static_cast<std::uint64_t>(i));
  }
  values_ = periodic_ + random_;
}

PotentialField::PotentialField(Eigen::VectorXd periodic, Eigen::VectorXd random,
                               double periodic_amplitude, double disorder_width,
                               std::optional<std::uint64_t> seed)
    : periodic_(std::move(periodic)),
      random_(std::move(random)),
      periodic_amplitude_(periodic_amplitude),
      disorder_width_(disorder_width),
      seed_(seed) {
  if (periodic_.size() != random_.size()) {
    throw DimensionMismatch("periodic and random parts differ in size");
  }
  values_ = periodic_ + random_;
}

PotentialField PotentialField::with_random_shift(Index site, double delta) const {
  if (site < 0 || site >= size()) throw InvalidArgument("perturbation site outside the box");
  Eigen::VectorXd random = random_;
  random[site] += delta;
  return PotentialField(periodic_, std::move(random), periodic_amplitude_, disorder_width_, seed_);
}

PotentialField PotentialField::shifted(double constant) const {
  Eigen::VectorXd random = random_.array() + constant;
  return PotentialField(periodic_, std::move(random), periodic_amplitude_, disorder_width_, seed_);
}

}  // namespace hfa
