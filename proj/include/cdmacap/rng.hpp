#pragma once
#include <cmath>
#include <cstdint>
#include <string_view>

namespace cdmacap {

// splitmix64 mixer. Chosen over <random> engines because reproducible sweep
// CSVs require every draw to be bit-stable across platforms; the standard
// distributions (and mt19937 seeding) leave implementation latitude.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// order-sensitive seed combiner: mix_seed(a,b) != mix_seed(b,a) in general
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t s = a ^ (0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2));
  splitmix64(s);
  return splitmix64(s);
}

inline uint64_t hash_string(std::string_view s) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_); }

  // uniform on [0, 1), 53-bit resolution
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller, one normal per call from exactly two uniforms; no caching so
  // the stream position never depends on how many normals were consumed.
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace cdmacap
