#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace targetbench {

// Seed discipline: every operation takes one 64-bit seed; internal streams are
// derived as splitmix64(seed XOR purpose_tag), optionally chained with an
// index. Work units (trees, folds, bootstrap replicates, grid cells) are
// seeded by index, so parallel scheduling cannot change results.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
  return splitmix64(seed ^ purpose);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                                    std::uint64_t index) {
  return splitmix64(derive_seed(seed, purpose) ^ splitmix64(index + 1));
}

namespace seed_tag {
constexpr std::uint64_t split = 0x5b8c3d2f01a6e917ULL;
constexpr std::uint64_t synthetic_x = 0x2c9e4b71d5f0a383ULL;
constexpr std::uint64_t synthetic_w = 0x7f31a9c8e2d46b05ULL;
constexpr std::uint64_t synthetic_noise = 0x91d2b6f4a0c87e13ULL;
constexpr std::uint64_t tree = 0x3e7a51c9f2b08d64ULL;
constexpr std::uint64_t folds = 0x845fd1093ab7c2e6ULL;
constexpr std::uint64_t mu0 = 0x19c6e83b5d20f7a4ULL;
constexpr std::uint64_t mu1 = 0x6d04b2f8c1a35e97ULL;
constexpr std::uint64_t propensity = 0xa25c80d7493f16ebULL;
constexpr std::uint64_t risk_fit = 0x4b93f6a1807cd2e5ULL;
constexpr std::uint64_t cate_fit = 0xe01d7c4a92b5f836ULL;
constexpr std::uint64_t confound_ties = 0x58a2c7e60f9341dbULL;
constexpr std::uint64_t assign_ties = 0xc7153e9db4a8f062ULL;
constexpr std::uint64_t random_scores = 0x3fa6d90b7e215c84ULL;
constexpr std::uint64_t nuisance = 0x90e45a2cf7d1b638ULL;
constexpr std::uint64_t bootstrap = 0x1c58b3d6a94e07f2ULL;
constexpr std::uint64_t alpha_search = 0x67f019c24db8a5e3ULL;
}  // namespace seed_tag

// Deterministic random stream. The engine is std::mt19937_64 (fully specified
// by the standard); uniform/normal/shuffle are implemented here rather than
// with std::*_distribution so the draw sequence does not depend on the
// standard library implementation.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer on [0, n), rejection-sampled for exact uniformity.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace targetbench
