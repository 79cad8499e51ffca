// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_PROBLEMS_HPP
#define EIGENROM_PROBLEMS_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>
#include "eigenrom/fem.hpp"
#include "eigenrom/mesh.hpp"

namespace eigenrom
{

enum class ProblemId
{
  Ho1d,
  Ho2d,
  Nonlinear1d,
  Nonaffine1p,
  Interface2p,
  Crossing
};

std::string to_string(ProblemId id);
ProblemId problem_id_from_string(const std::string &name);

// Axis-aligned interval or rectangle.
struct Domain
{
  int dim = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

struct ParameterBox
{
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> mu, double tol = 0.0) const;
};

// Pointwise nonlinearity entering as mu^2 g(u).
struct Nonlinearity
{
  std::function<double(double)> g;
  std::function<double(double)> dg;
};

// Discretization settings shared by training and every later re-solve.
struct Discretization
{
  double h = 0.05;
  TrianglePattern pattern = TrianglePattern::CrissCross;
  QuadratureRule quadrature = QuadratureRule::Gauss;
  // Half-width of the coefficient ramp across a material interface, in units of h.
  double interface_width = 2.0;

  bool operator==(const Discretization &) const = default;
};

struct ProblemSpec
{
  ProblemId id = ProblemId::Ho1d;
  Domain domain;
  ParameterBox parameter_box;
  // Operator pair on interior dofs. For nonlinear problems this is the linear part.
  std::function<AssembledOperator(const Mesh &, std::span<const double>,
                                  const Discretization &)>
      assemble;
  std::optional<Nonlinearity> nonlinearity;
  // Closed-form eigenvalue for a tuple of modal indices, when one exists.
  std::function<double(std::span<const int>, std::span<const double>)> analytic_eigenvalue;

  std::string name() const { return to_string(id); }
  Mesh build_mesh(const Discretization &disc) const;
  // Smallest `count` analytic eigenvalues in ascending order.
  std::vector<double> analytic_sorted(std::span<const double> mu, int count) const;
};

ProblemSpec ho1d_spec();
ProblemSpec ho2d_spec();
ProblemSpec nonlinear1d_spec();
ProblemSpec nonaffine1p_spec();
ProblemSpec interface2p_spec();
ProblemSpec crossing_spec();

ProblemSpec problem_spec(ProblemId id);

// Smoothed material coefficient of the interface problem.
double interface_permittivity(const Point &x, std::span<const double> mu, double width);

}  // namespace eigenrom

#endif  // EIGENROM_PROBLEMS_HPP
