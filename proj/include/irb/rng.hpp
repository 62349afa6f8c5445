// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_RNG_HPP
#define IRB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace irb {

// Seed for every stochastic operation. Equal seeds and equal inputs must give
// bit-identical results, so all sampling goes through Rng below instead of the
// implementation-defined std::*_distribution classes.
struct Seed {
  std::uint64_t value = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream from a base seed. Used to keep e.g. batch
// shuffling and Bernoulli sampling on separate streams within one run.
inline Seed derive_seed(Seed base, std::uint64_t stream) {
  return Seed{splitmix64(base.value ^ splitmix64(stream))};
}

class Rng {
 public:
  explicit Rng(Seed seed) : gen_(seed.value) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Two uniforms per draw, no cached state.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). Modulo bias is below 2^-32 for desk-scale n.
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace irb

#endif  // IRB_RNG_HPP
