// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_RNG_HPP
#define EIGENROM_RNG_HPP

#include <cstdint>

namespace eigenrom
{

//
// SplitMix64 generator. The state advances by the golden-ratio increment
// 0x9E3779B97F4A7C15 and each output is the standard Stafford mix of the state.
// Doubles take the top 53 bits, so streams are identical on every platform.
//
class SplitMix64
{
public:
  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next();

  // Uniform on [0, 1).
  double Uniform();

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Integer uniform on [0, n).
  std::uint64_t Below(std::uint64_t n);

  // Independent child stream, used to hand sub-seeds to components.
  SplitMix64 Split() { return SplitMix64(Next()); }

private:
  std::uint64_t state_;
};

// Deterministic sub-seed for a named stream index.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace eigenrom

#endif  // EIGENROM_RNG_HPP
