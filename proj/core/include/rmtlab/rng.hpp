// Counter-based random streams: a (seed, stream) pair keys an independent
// generator, so Monte Carlo trials can be farmed out in any order and still
// reproduce bit for bit.
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rmtlab {

// PCG XSL-RR 128/64. The stream index selects the increment (2*stream+1) and
// the seed selects the starting state, so distinct (seed, stream) pairs map to
// distinct generator states by construction.
class Pcg64 {
 public:
  using result_type = std::uint64_t;

  Pcg64(std::uint64_t seed, std::uint64_t stream) {
    inc_ = (static_cast<u128>(stream) << 1u) | 1u;
    state_ = 0u;
    step();
    state_ += (static_cast<u128>(seed) << 64u) | seed;
    step();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~static_cast<result_type>(0); }

  result_type operator()() {
    const u128 old = state_;
    step();
    const auto xored = static_cast<std::uint64_t>(old >> 64u) ^
                       static_cast<std::uint64_t>(old);
    const auto rot = static_cast<unsigned>(old >> 122u);
    return (xored >> rot) | (xored << ((64u - rot) & 63u));
  }

 private:
  using u128 = unsigned __int128;

  void step() {
    // Multiplier from the reference pcg64 implementation.
    constexpr u128 mult =
        (static_cast<u128>(2549297995355413924ull) << 64u) | 4865540595714422341ull;
    state_ = state_ * mult + inc_;
  }

  u128 state_;
  u128 inc_;
};

struct SeedStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  Pcg64 engine() const { return Pcg64(seed, stream); }
  SeedStream at(std::uint64_t k) const { return {seed, stream + k}; }
};

// Gaussian draws bound to one stream. Draw order is part of the
// reproducibility contract, so samplers consume these sequentially.
class GaussianStream {
 public:
  explicit GaussianStream(SeedStream s) : eng_(s.engine()) {}

  double real() { return normal_(eng_); }

  // Standard complex normal, E|z|^2 = 1.
  std::complex<double> complex_unit() {
    const double x = normal_(eng_);
    const double y = normal_(eng_);
    return {x * kInvSqrt2, y * kInvSqrt2};
  }

  double uniform() { return uniform_(eng_); }

 private:
  static constexpr double kInvSqrt2 = 0.7071067811865475244;
  Pcg64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace rmtlab
