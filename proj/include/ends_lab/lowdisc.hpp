#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ends_lab {

/// Radical inverse of i in base b.
inline double radical_inverse(std::uint64_t i, unsigned b) {
  double inv = 1.0 / b, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % b);
    i /= b;
    f *= inv;
  }
  return r;
}

/// Halton sequence with a Cranley-Patterson rotation drawn from `seed`. Point i
/// does not depend on how many points are requested, so a run of N points is a
/// prefix of a run of 2N points.
class ScrambledHalton {
 public:
  ScrambledHalton(unsigned dims, std::uint64_t seed) : dims_(dims) {
    static constexpr std::array<unsigned, 10> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    if (dims < 1 || dims > kPrimes.size()) throw std::invalid_argument("ScrambledHalton: 1..10 dimensions");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (unsigned d = 0; d < dims; ++d) {
      bases_.push_back(kPrimes[d]);
      shifts_.push_back(U(rng));
    }
  }

  unsigned dims() const { return dims_; }

  /// Coordinate d of point i (i >= 0), in [0, 1).
  double operator()(std::uint64_t i, unsigned d) const {
    double v = radical_inverse(i + 1, bases_[d]) + shifts_[d];
    return v - std::floor(v);
  }

 private:
  unsigned dims_;
  std::vector<unsigned> bases_;
  std::vector<double> shifts_;
};

}  // namespace ends_lab
