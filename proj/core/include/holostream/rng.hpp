#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace holostream::rng {

// splitmix64 finalizer; good avalanche, used to fold structured coordinates
// (seed, stream tag, episode, slot, user, ...) into independent engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Combine an arbitrary list of 64-bit coordinates into one seed. Order
// matters: the accumulator is re-hashed before each fold so that swapping two
// coordinates changes the result (a bare xor of equally-hashed halves would
// commute).
template <typename... Ts>
std::uint64_t mix(std::uint64_t head, Ts... tail) {
  std::uint64_t acc = splitmix64(head);
  ((acc = splitmix64(splitmix64(acc) ^
                     splitmix64(static_cast<std::uint64_t>(tail)))),
   ...);
  return acc;
}

// Stream tags keep draws for unrelated purposes statistically independent even
// when the remaining coordinates coincide.
enum class Stream : std::uint64_t {
  kChannel = 0xC4A11ULL,
  kFov = 0xF0511ULL,
  kEpisode = 0xE9150ULL,
  kPolicy = 0xAC710ULL,
  kInit = 0x1817ULL,
  kShuffle = 0x5881ULL,
  kPermute = 0x9E87ULL,
};

template <typename... Ts>
std::uint64_t mix(std::uint64_t seed, Stream stream, Ts... tail) {
  return mix(seed, static_cast<std::uint64_t>(stream), tail...);
}

// Deterministic scalar generator. Gaussian draws use an explicit Box-Muller
// transform instead of std::normal_distribution so that sequences are
// identical across standard-library implementations.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n). n must be positive; modulo bias is irrelevant here
  // (n is always tiny compared to 2^64).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  // Standard normal via Box-Muller; draws pairs and caches the second value.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = radius * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return radius * std::cos(kTwoPi * u2);
  }

  std::mt19937_64& raw() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace holostream::rng
