// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/rng.hpp"

namespace eigenrom
{

std::uint64_t SplitMix64::Next()
{
  std::uint64_t z = (state_ += kIncrement);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::Uniform()
{
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::Below(std::uint64_t n)
{
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  std::uint64_t x;
  do
  {
    x = Next();
  } while (x >= limit);
  return x % n;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream)
{
  SplitMix64 g(seed ^ (stream * 0xD1B54A32D192ED03ULL));
  g.Next();
  return g.Next();
}

}  // namespace eigenrom
