#ifndef SVAE_RANDOM_HPP
#define SVAE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace svae {

// Seeded random engine with explicit uniform/normal draws.
//
// The normal draw is a hand-rolled Box-Muller transform instead of
// std::normal_distribution so that the byte-level draw sequence is fixed by
// this file rather than by the standard library implementation. All sampling
// in the project flows through this class; substreams are derived with
// sub_rng so that parallel workers and resumable loops get independent,
// reproducible streams.
class RandomEngine {
public:
  explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

  RandomEngine(std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{a, b};
    gen_.seed(seq);
  }

  RandomEngine(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::seed_seq seq{a, b, c};
    gen_.seed(seq);
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform draw in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(static_cast<std::uint64_t>(n) * uniform());
  }

  // Standard normal draw (Box-Muller, second value cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Derived stream: deterministic function of the parent seed and tags.
inline RandomEngine sub_rng(std::uint64_t seed, std::uint64_t tag) {
  return RandomEngine(seed, tag);
}
inline RandomEngine sub_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t idx) {
  return RandomEngine(seed, tag, idx);
}

}  // namespace svae

#endif
