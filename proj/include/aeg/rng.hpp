#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded randomness used across the library. All sampling goes through the
// helpers below so that a (seed, stream) pair fully determines every draw,
// independent of platform quirks in <random> distributions.

namespace aeg {

// Stream tags keep independent sampling sites from sharing a raw seed
// (e.g. a problem's x* and an experiment's x0 must differ under seed 0).
enum class RngStream : std::uint64_t {
  Problem = 0x701u,
  InitialPoint = 0x702u,
  Audit = 0x703u,
  ScheduleNoise = 0x704u,
  Internal = 0x705u,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, RngStream stream) {
  std::uint64_t s = seed ^ (static_cast<std::uint64_t>(stream) * 0xd1342543de82ef95ull);
  return splitmix64(s);
}

// 53-bit mantissa mapping; in (0, 1] so log() is always safe.
inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

class Rng {
 public:
  Rng(std::uint64_t seed, RngStream stream) : engine_(mix_seed(seed, stream)) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * u01_from_bits(engine_());
  }

  // Box-Muller; two engine draws per variate, no cached state.
  double normal() {
    const double u1 = u01_from_bits(engine_());
    const double u2 = u01_from_bits(engine_());
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Stateless per-index standard normal: reproducible and evaluation-order
// independent, as required by noise-corrupted schedules.
inline double counter_normal(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = mix_seed(seed, RngStream::ScheduleNoise) ^ (index * 0x2545f4914f6cdd1dull);
  const std::uint64_t b1 = splitmix64(s);
  const std::uint64_t b2 = splitmix64(s);
  const double u1 = u01_from_bits(b1);
  const double u2 = u01_from_bits(b2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace aeg
