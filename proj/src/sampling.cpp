// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/sampling.hpp"

#include <numeric>
#include "eigenrom/error.hpp"
#include "eigenrom/rng.hpp"

namespace eigenrom
{

namespace
{

void check_box(const ParameterBox &box)
{
  EIGENROM_VERIFY(box.dim() >= 1 && box.lo.size() == box.hi.size(), InvalidInput,
                  "parameter box is malformed");
  for (int i = 0; i < box.dim(); i++)
  {
    EIGENROM_VERIFY(box.lo[i] < box.hi[i], InvalidInput, "parameter box has lo >= hi in axis ", i);
  }
}

}  // namespace

std::string to_string(DesignKind kind)
{
  switch (kind)
  {
    case DesignKind::UniformGrid:
      return "uniform_grid";
    case DesignKind::LatinHypercube:
      return "latin_hypercube";
    case DesignKind::Random:
      return "random";
    case DesignKind::Explicit:
      return "explicit";
  }
  return "explicit";
}

DesignKind design_kind_from_string(const std::string &name)
{
  for (auto k : {DesignKind::UniformGrid, DesignKind::LatinHypercube, DesignKind::Random,
                 DesignKind::Explicit})
  {
    if (to_string(k) == name)
    {
      return k;
    }
  }
  detail::Throw<InvalidInput>("unknown design kind \"", name, "\"");
}

SampleDesign uniform_grid(const ParameterBox &box, const std::vector<int> &counts)
{
  check_box(box);
  EIGENROM_VERIFY(static_cast<int>(counts.size()) == box.dim(), InvalidInput, "grid needs ",
                  box.dim(), " counts, got ", counts.size());
  long total = 1;
  for (int c : counts)
  {
    EIGENROM_VERIFY(c >= 2, InvalidInput, "grid count must be at least 2, got ", c);
    total *= c;
  }

  SampleDesign design;
  design.kind = DesignKind::UniformGrid;
  const int d = box.dim();
  std::vector<int> idx(d, 0);
  for (long t = 0; t < total; t++)
  {
    ParameterPoint p(d);
    for (int i = 0; i < d; i++)
    {
      p[i] = (idx[i] == counts[i] - 1)
                 ? box.hi[i]
                 : box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (counts[i] - 1.0);
    }
    design.points.push_back(std::move(p));
    for (int i = d - 1; i >= 0; i--)
    {
      if (++idx[i] < counts[i])
      {
        break;
      }
      idx[i] = 0;
    }
  }
  return design;
}

SampleDesign latin_hypercube(const ParameterBox &box, int n_s, std::uint64_t seed)
{
  check_box(box);
  EIGENROM_VERIFY(n_s >= 2, InvalidInput, "Latin hypercube needs n_s >= 2, got ", n_s);
  SplitMix64 rng(seed);
  const int d = box.dim();
  SampleDesign design;
  design.kind = DesignKind::LatinHypercube;
  design.seed = seed;
  design.points.assign(n_s, ParameterPoint(d));
  for (int i = 0; i < d; i++)
  {
    std::vector<int> perm(n_s);
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = n_s - 1; j > 0; j--)
    {
      std::swap(perm[j], perm[rng.Below(j + 1)]);
    }
    for (int j = 0; j < n_s; j++)
    {
      const double t = (perm[j] + rng.Uniform()) / n_s;
      design.points[j][i] = box.lo[i] + (box.hi[i] - box.lo[i]) * t;
    }
  }
  return design;
}

SampleDesign random_uniform(const ParameterBox &box, int n_s, std::uint64_t seed)
{
  check_box(box);
  EIGENROM_VERIFY(n_s >= 1, InvalidInput, "random design needs n_s >= 1");
  SplitMix64 rng(seed);
  SampleDesign design;
  design.kind = DesignKind::Random;
  design.seed = seed;
  for (int j = 0; j < n_s; j++)
  {
    ParameterPoint p(box.dim());
    for (int i = 0; i < box.dim(); i++)
    {
      p[i] = rng.Uniform(box.lo[i], box.hi[i]);
    }
    design.points.push_back(std::move(p));
  }
  return design;
}

void validate_design(const SampleDesign &design, const ParameterBox &box)
{
  EIGENROM_VERIFY(design.size() >= 2, InvalidInput, "design needs at least 2 points, got ",
                  design.size());
  for (int j = 0; j < design.size(); j++)
  {
    EIGENROM_VERIFY(box.contains(design.points[j], 1e-12), InvalidInput, "design point ", j,
                    " lies outside the parameter box");
    for (int k = 0; k < j; k++)
    {
      EIGENROM_VERIFY(design.points[j] != design.points[k], InvalidInput, "design points ", k,
                      " and ", j, " coincide");
    }
  }
}

}  // namespace eigenrom
