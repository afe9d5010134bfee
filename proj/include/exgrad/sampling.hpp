#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "exgrad/space.hpp"

namespace exgrad {

/// Deterministic low-discrepancy points in [0,1)^dim (Halton, prime bases).
/// Dimensions beyond the prime table reuse bases with a coordinate shift.
template <typename Scalar>
class HaltonSequence {
 public:
  explicit HaltonSequence(Index dim, std::uint64_t start = 1) : dim_(dim), index_(start) {}

  Vector<Scalar> next() {
    static constexpr std::array<std::uint64_t, 16> primes{2,  3,  5,  7,  11, 13, 17, 19,
                                                          23, 29, 31, 37, 41, 43, 47, 53};
    Vector<Scalar> out(dim_);
    for (Index d = 0; d < dim_; ++d) {
      const auto base = primes[static_cast<std::size_t>(d) % primes.size()];
      const auto shift = static_cast<std::uint64_t>(d) / primes.size();
      out[d] = radical_inverse(index_ + 7 * shift, base);
    }
    ++index_;
    return out;
  }

 private:
  static Scalar radical_inverse(std::uint64_t n, std::uint64_t base) {
    Scalar result(0);
    Scalar f = Scalar(1) / Scalar(base);
    while (n > 0) {
      result += f * Scalar(n % base);
      n /= base;
      f /= Scalar(base);
    }
    return result;
  }

  Index dim_;
  std::uint64_t index_;
};

/// Seeded uniform sampler; the only RNG used by the sampled checkers.
template <typename Scalar>
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

  Scalar uniform(Scalar lo, Scalar hi) {
    std::uniform_real_distribution<double> dist(static_cast<double>(lo), static_cast<double>(hi));
    return Scalar(dist(engine_));
  }

  Vector<Scalar> unit_cube(Index dim) {
    Vector<Scalar> v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = uniform(Scalar(0), Scalar(1));
    return v;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace exgrad
