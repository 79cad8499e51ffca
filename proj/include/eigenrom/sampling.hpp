// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_SAMPLING_HPP
#define EIGENROM_SAMPLING_HPP

#include <cstdint>
#include <string>
#include <vector>
#include "eigenrom/problems.hpp"

namespace eigenrom
{

enum class DesignKind
{
  UniformGrid,
  LatinHypercube,
  Random,
  Explicit
};

std::string to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string &name);

using ParameterPoint = std::vector<double>;

struct SampleDesign
{
  std::vector<ParameterPoint> points;
  DesignKind kind = DesignKind::Explicit;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(points.size()); }
};

// Tensor product of equispaced grids, endpoints included. The first coordinate
// varies slowest.
SampleDesign uniform_grid(const ParameterBox &box, const std::vector<int> &counts);

// One point per stratum and axis: stratum j holds (j + U[0,1)) / n_s, strata
// matched across axes by independent shuffles.
SampleDesign latin_hypercube(const ParameterBox &box, int n_s, std::uint64_t seed);

SampleDesign random_uniform(const ParameterBox &box, int n_s, std::uint64_t seed);

// Training-design checks: points inside the closed box, at least two, pairwise distinct.
void validate_design(const SampleDesign &design, const ParameterBox &box);

}  // namespace eigenrom

#endif  // EIGENROM_SAMPLING_HPP
