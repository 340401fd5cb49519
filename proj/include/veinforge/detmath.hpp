#pragma once

#include <cmath>
#include <cstdint>

namespace vf {

// splitmix64 finalizer. Pure function of its argument.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xorshift64* generator. Update rule (documented in the README so other
// implementations can reproduce the streams byte for byte):
//   s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;  output = s * 0x2545f4914f6cdd1d
struct Xorshift64Star {
  std::uint64_t state;

  explicit Xorshift64Star(std::uint64_t seed)
      : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    std::uint64_t s = state;
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    state = s;
    return s * 0x2545f4914f6cdd1dULL;
  }

  // Uniform in [0, 1): top 53 bits scaled by 2^-53. Exact IEEE arithmetic.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform integer in [lo, hi] via multiply-shift; unbiased enough for
  // procedural generation and exactly reproducible.
  int uniform_int(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(
                    static_cast<std::uint64_t>((next() >> 32) * span >> 32));
  }

  // Standard normal approximated by the Irwin-Hall sum of 12 uniforms minus
  // 6. Pure +/- arithmetic, so the stream stays platform-independent.
  double gauss() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += next_unit();
    return s - 6.0;
  }
};

// Per-stream seed: independent, order-free streams per (seed, subject, sample).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t subject,
                                 std::uint64_t sample) {
  return splitmix64(splitmix64(splitmix64(seed) + 0x53554246ULL + subject) +
                    0x53414d50ULL + sample);
}

// Polynomial sin/cos/exp used by the synthetic generator. libm transcendentals
// are not bit-identical across platforms; these are plain IEEE +,*,floor and
// reproduce exactly wherever doubles are IEEE-754.
double det_sin(double x);
double det_cos(double x);
// exp(-x) for x >= 0 (clamps to 0 beyond ~745).
double det_exp_neg(double x);

}  // namespace vf
