#pragma once

#include <cstdint>
#include <random>

namespace panelspec {

// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A reproducible random stream. Only the fully specified mt19937_64 engine is
// used; uniforms, integers and normals are derived here rather than through
// std:: distributions, whose output is implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Independent stream for Monte Carlo replication `index` under `master_seed`.
  static RandomStream for_replication(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(master_seed ^ mix64(index + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  // Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
  std::uint64_t index(std::uint64_t bound);

  // Standard normal by inversion of the uniform draw.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace panelspec
