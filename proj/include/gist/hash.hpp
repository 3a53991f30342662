#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace gist {

// FNV-1a, 64-bit. This is the single stable hash for the whole pipeline:
// user sampling, cohort selection, cache keys, and seed derivation all go
// through it, and the run manifest records the name ("fnv1a64") so outputs
// stay comparable across builds.
inline constexpr std::uint64_t kFnv64Offset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnv64Prime = 0x00000100000001b3ull;
inline constexpr const char* kHashName = "fnv1a64";

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnv64Offset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnv64Prime;
  }
  return h;
}

// Feeds an integer as 8 little-endian bytes.
inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnv64Offset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= kFnv64Prime;
  }
  return h;
}

// hash(seed, text): the seed's bytes first, then the text's bytes.
inline std::uint64_t seeded_hash(std::uint64_t seed, std::string_view text) {
  return fnv1a64(text, fnv1a64_u64(seed));
}

// Child seed from a run seed plus context strings. Parts are length-prefixed
// so ("ab","c") and ("a","bc") derive different seeds.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::string_view> parts) {
  std::uint64_t h = fnv1a64_u64(seed);
  for (std::string_view p : parts) {
    h = fnv1a64_u64(p.size(), h);
    h = fnv1a64(p, h);
  }
  return h;
}

std::string hex16(std::uint64_t v);

// splitmix64. Small, fast, and bit-identical on every platform; all shuffles
// and samples in the pipeline draw from it rather than <random> distributions
// (whose outputs vary across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased value in [0, n) via rejection sampling.
  std::uint64_t bounded(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
    std::uint64_t v = next();
    while (v < reject_below) v = next();
    return v % n;
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), uniform without replacement,
  // in selection order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    if (k > n) k = n;
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::uint64_t state_;
};

}  // namespace gist
