#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rtcode/common.hpp"

namespace rtcode {

// splitmix64; used to derive independent sub-seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with explicit seeding. Doubles come from the top 53 bits of
// the raw engine output, so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform over [0, n). Modulo bias is immaterial for the tiny n used here.
  int uniform_int(int n) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  // Uniform over the probability simplex (flat Dirichlet via normalized
  // exponentials).
  Vec simplex(int n) {
    Vec v(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& p : v) {
      double u = uniform01();
      if (u <= 0.0) u = 0x1.0p-53;
      p = -std::log(u);
      total += p;
    }
    for (auto& p : v) p /= total;
    return v;
  }

  int categorical(const Vec& p) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rtcode
