// SPDX-License-Identifier: Apache-2.0
//
// Deterministic, platform-independent random streams. Every (seed, trial,
// purpose) triple opens an independent substream whose draws depend on no
// global state, so trials can run on any number of threads and still produce
// byte-identical results.
#pragma once

#include <complex>
#include <cmath>
#include <cstdint>

namespace rislens {

// Fixed purpose tags keep the per-trial substreams disjoint: drawing more
// profile phases can never shift the noise sequence.
enum class StreamPurpose : std::uint64_t {
  kProfile = 1,  // phase-profile randomness
  kPrior = 2,    // prior position samples
  kNoise = 3,    // observation noise
  kSync = 4,     // synchronization phase offset
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose)
      : state_(seed) {
    next_raw();  // scramble the seed before mixing in the identifiers
    state_ ^= trial * 0xA24BAED4963EE407ull + 0x9FB21C651E98DF25ull;
    next_raw();
    state_ ^= static_cast<std::uint64_t>(purpose) * 0x9E3779B97F4A7C15ull + 1;
    next_raw();
  }

  std::uint64_t next_raw() {  // splitmix64 step
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_raw() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; draws two uniforms per pair and caches
  // the second value.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly-symmetric complex normal with total variance `var`.
  std::complex<double> cnormal(double var) {
    const double s = std::sqrt(0.5 * var);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rislens
