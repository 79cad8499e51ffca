// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>
#include <doctest.h>
#include "eigenrom/error.hpp"
#include "eigenrom/rng.hpp"
#include "eigenrom/sampling.hpp"

using namespace eigenrom;

namespace
{

ParameterBox box1(double lo, double hi)
{
  return ParameterBox{{lo}, {hi}};
}

ParameterBox box2(double lo, double hi)
{
  return ParameterBox{{lo, lo}, {hi, hi}};
}

}  // namespace

TEST_CASE("SplitMix64 reference stream")
{
  // Published reference outputs for seed 0 and seed 1234567.
  SplitMix64 zero(0);
  CHECK(zero.Next() == 0xE220A8397B1DCDAFULL);
  CHECK(zero.Next() == 0x6E789E6AA1B965F4ULL);
  SplitMix64 other(1234567);
  CHECK(other.Next() == 6457827717110365317ULL);
  CHECK(other.Next() == 3203168211198807973ULL);

  SplitMix64 rng(42);
  for (int i = 0; i < 10000; i++)
  {
    const double u = rng.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.Below(7) < 7);
  }
  CHECK(DeriveSeed(1, 1) != DeriveSeed(1, 2));
  CHECK(DeriveSeed(1, 1) == DeriveSeed(1, 1));
  CHECK(DeriveSeed(1, 1) != DeriveSeed(2, 1));
}

TEST_CASE("uniform grid")
{
  const SampleDesign g = uniform_grid(box1(1, 9), {41});
  REQUIRE(g.size() == 41);
  for (int i = 0; i < 41; i++)
  {
    CHECK(g.points[i][0] == doctest::Approx(1.0 + 0.2 * i).epsilon(1e-14));
  }
  CHECK(g.points.front()[0] == 1.0);
  CHECK(g.points.back()[0] == 9.0);
  CHECK(g.kind == DesignKind::UniformGrid);

  const SampleDesign two = uniform_grid(box1(0, 1), {2});
  CHECK(two.points == std::vector<ParameterPoint>{{0.0}, {1.0}});

  const SampleDesign iface = uniform_grid(ParameterBox{{0.1, 1.0}, {0.2, 8.0}}, {2, 36});
  CHECK(iface.size() == 72);
  CHECK(iface.points[0] == ParameterPoint{0.1, 1.0});
  CHECK(iface.points[1][0] == 0.1);
  CHECK(iface.points[1][1] == doctest::Approx(1.2));
  CHECK(iface.points[71] == ParameterPoint{0.2, 8.0});
  validate_design(iface, ParameterBox{{0.1, 1.0}, {0.2, 8.0}});

  CHECK_THROWS_AS(uniform_grid(box1(0, 1), {1}), InvalidInput);
  CHECK_THROWS_AS(uniform_grid(box1(0, 1), {3, 3}), InvalidInput);
  CHECK_THROWS_AS(uniform_grid(box1(1, 0), {3}), InvalidInput);
}

TEST_CASE("Latin hypercube strata")
{
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL})
  {
    const SampleDesign d = latin_hypercube(box2(0, 1), 4, seed);
    REQUIRE(d.size() == 4);
    for (int axis = 0; axis < 2; axis++)
    {
      std::set<int> strata;
      for (const auto &p : d.points)
      {
        strata.insert(static_cast<int>(std::floor(p[axis] * 4)));
      }
      CHECK(strata == std::set<int>{0, 1, 2, 3});
    }
  }
  const SampleDesign a = latin_hypercube(box2(0.4, 1), 25, 7);
  const SampleDesign b = latin_hypercube(box2(0.4, 1), 25, 7);
  CHECK(a.points == b.points);
  CHECK(a.points != latin_hypercube(box2(0.4, 1), 25, 8).points);
  double min_dist = 1e300;
  for (int i = 0; i < a.size(); i++)
  {
    for (int j = 0; j < i; j++)
    {
      min_dist = std::min(min_dist, std::hypot(a.points[i][0] - a.points[j][0],
                                               a.points[i][1] - a.points[j][1]));
    }
  }
  CHECK(min_dist > 0.0);
  validate_design(a, box2(0.4, 1));
  CHECK_THROWS_AS(latin_hypercube(box2(0, 1), 1, 1), InvalidInput);
}

TEST_CASE("random design")
{
  const ParameterBox box = box2(-2, 6);
  const SampleDesign d = random_uniform(box, 1000, 31);
  CHECK(d.points == random_uniform(box, 1000, 31).points);
  double sum0 = 0.0, sum1 = 0.0;
  for (const auto &p : d.points)
  {
    CHECK(box.contains(p));
    sum0 += p[0];
    sum1 += p[1];
  }
  // Uniform on [-2, 6]: mean 2, std 8 / sqrt(12); sample mean within 3 standard errors.
  const double se = 8.0 / std::sqrt(12.0) / std::sqrt(1000.0);
  CHECK(std::abs(sum0 / 1000 - 2.0) <= 3 * se);
  CHECK(std::abs(sum1 / 1000 - 2.0) <= 3 * se);
}

TEST_CASE("design validation")
{
  const ParameterBox box = box1(1, 9);
  SampleDesign d;
  d.points = {{1.0}};
  CHECK_THROWS_AS(validate_design(d, box), InvalidInput);
  d.points = {{1.0}, {1.0}};
  CHECK_THROWS_AS(validate_design(d, box), InvalidInput);
  d.points = {{1.0}, {9.5}};
  CHECK_THROWS_AS(validate_design(d, box), InvalidInput);
  d.points = {{1.0}, {9.0}};
  CHECK_NOTHROW(validate_design(d, box));
}

TEST_CASE("design kind names")
{
  for (const char *name : {"uniform_grid", "latin_hypercube", "random", "explicit"})
  {
    CHECK(to_string(design_kind_from_string(name)) == name);
  }
  CHECK_THROWS_AS(design_kind_from_string("sobol"), InvalidInput);
}
