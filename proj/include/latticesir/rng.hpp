#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace latticesir {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t replica_seed(std::uint64_t base, std::uint64_t replica) {
  return splitmix64(splitmix64(base) ^ splitmix64(replica + 0x632be59bd9b4e019ULL));
}

struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  // uniform in [0, 1), 53-bit mantissa
  double u01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-u01()) / rate; }
};

}  // namespace latticesir
