#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace uavsched {

// Random streams are portable across platforms: every value is produced by
// integer arithmetic defined here, never by <random> distributions.
//
//  * splitmix64 is the mixing function (a bijection on 64-bit words).
//  * derive_seed() labels a sub-stream by (seed, purpose, up to 3 indices).
//  * Rng is xoshiro256** seeded through splitmix64.

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over the label bytes.
std::uint64_t label_hash(std::string_view label);

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// Top 53 bits as a double in [0, 1).
double unit_interval(std::uint64_t bits);

// Counter-based draw: uniform in [lo, hi], a pure function of its arguments.
double counter_uniform(std::uint64_t seed, std::string_view label, std::uint64_t a,
                       std::uint64_t b, std::uint64_t c, double lo, double hi);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi]
  std::uint64_t below(std::uint64_t n);   // [0, n), unbiased
  double normal();                        // standard normal, Box-Muller

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace uavsched
