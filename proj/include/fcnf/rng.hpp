#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace fcnf {

// One splitmix64 step. Used to expand seeds and to derive stream keys.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t mix64(uint64_t x) {
  uint64_t s = x;
  return splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna). Pinned here so that a given seed
// reproduces the same draws on every platform and build; std::mt19937 plus
// std::uniform_* would not give that guarantee across standard libraries.
class Xoshiro256pp {
 public:
  using result_type = uint64_t;

  explicit Xoshiro256pp(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  uint64_t operator()() { return next(); }
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ULL; }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) by rejection.
  uint64_t below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Inclusive range.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> state_{};
};

// Named per-concern streams. Each consumer draws from its own stream so that
// adding draws to one concern never perturbs another (same seed, same bytes).
enum class RngStream : uint64_t {
  kTopology = 1,
  kRoles = 2,
  kCosts = 3,
  kRequests = 4,
  kSampling = 5,
  kFolds = 6,
  kPipeline = 7,
};

inline Xoshiro256pp make_stream(uint64_t seed, RngStream stream) {
  return Xoshiro256pp(mix64(seed) ^
                      mix64(0x8f1bbcdcbfa53e0bULL + static_cast<uint64_t>(stream)));
}

// Fisher-Yates; after the call the first `take` slots hold the sample.
template <typename T>
void partial_shuffle(std::vector<T>& items, size_t take, Xoshiro256pp& rng) {
  const size_t n = items.size();
  if (take > n) take = n;
  for (size_t i = 0; i < take; ++i) {
    const size_t j = i + static_cast<size_t>(rng.below(n - i));
    std::swap(items[i], items[j]);
  }
}

template <typename T>
void shuffle_all(std::vector<T>& items, Xoshiro256pp& rng) {
  if (!items.empty()) partial_shuffle(items, items.size() - 1, rng);
}

}  // namespace fcnf
