// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include "eigenrom/error.hpp"

namespace eigenrom
{

namespace
{

constexpr double kPi = std::numbers::pi;

// Modal indices start at `first`; the loop bound covers the smallest `count` values
// for the monotone formulas used here.
std::vector<double> enumerate_sorted(const ProblemSpec &spec, std::span<const double> mu,
                                     int count, int first)
{
  std::vector<double> values;
  const int top = first + count + 2;
  if (spec.domain.dim == 1)
  {
    for (int n = first; n < top; n++)
    {
      const int idx[1] = {n};
      values.push_back(spec.analytic_eigenvalue(idx, mu));
    }
  }
  else
  {
    for (int m = first; m < top; m++)
    {
      for (int n = first; n < top; n++)
      {
        const int idx[2] = {m, n};
        values.push_back(spec.analytic_eigenvalue(idx, mu));
      }
    }
  }
  std::sort(values.begin(), values.end());
  values.resize(std::min<size_t>(values.size(), count));
  return values;
}

double radius2(const Point &x, std::span<const double>)
{
  return x.x() * x.x() + x.y() * x.y();
}

}  // namespace

std::string to_string(ProblemId id)
{
  switch (id)
  {
    case ProblemId::Ho1d:
      return "ho1d";
    case ProblemId::Ho2d:
      return "ho2d";
    case ProblemId::Nonlinear1d:
      return "nonlinear1d";
    case ProblemId::Nonaffine1p:
      return "nonaffine1p";
    case ProblemId::Interface2p:
      return "interface2p";
    case ProblemId::Crossing:
      return "crossing";
  }
  return "unknown";
}

ProblemId problem_id_from_string(const std::string &name)
{
  for (auto id : {ProblemId::Ho1d, ProblemId::Ho2d, ProblemId::Nonlinear1d,
                  ProblemId::Nonaffine1p, ProblemId::Interface2p, ProblemId::Crossing})
  {
    if (to_string(id) == name)
    {
      return id;
    }
  }
  detail::Throw<InvalidInput>("unknown problem id \"", name, "\"");
}

bool ParameterBox::contains(std::span<const double> mu, double tol) const
{
  if (static_cast<int>(mu.size()) != dim())
  {
    return false;
  }
  for (int i = 0; i < dim(); i++)
  {
    const double slack = tol * (hi[i] - lo[i]);
    if (mu[i] < lo[i] - slack || mu[i] > hi[i] + slack)
    {
      return false;
    }
  }
  return true;
}

Mesh ProblemSpec::build_mesh(const Discretization &disc) const
{
  EIGENROM_VERIFY(disc.h > 0.0, InvalidInput, "mesh size must be positive");
  if (domain.dim == 1)
  {
    return build_interval_mesh(domain.x0, domain.x1, disc.h);
  }
  const int n = static_cast<int>(std::lround((domain.x1 - domain.x0) / disc.h));
  return build_rect_mesh(domain.x0, domain.x1, domain.y0, domain.y1, n, disc.pattern);
}

std::vector<double> ProblemSpec::analytic_sorted(std::span<const double> mu, int count) const
{
  EIGENROM_VERIFY(static_cast<bool>(analytic_eigenvalue), InvalidInput, "problem ", name(),
                  " has no closed-form eigenvalues");
  return enumerate_sorted(*this, mu, count, id == ProblemId::Crossing ? 1 : 0);
}

ProblemSpec ho1d_spec()
{
  ProblemSpec spec;
  spec.id = ProblemId::Ho1d;
  spec.domain = {1, -10.0, 10.0, 0.0, 0.0};
  spec.parameter_box = {{1.0}, {9.0}};
  spec.assemble = [](const Mesh &mesh, std::span<const double> mu, const Discretization &disc)
  {
    const double w = mu[0] * mu[0];
    CoefficientField x2 = [](const Point &x, std::span<const double>) { return x.x() * x.x(); };
    AssembledOperator op;
    op.a_matrix =
        apply_dirichlet(SparseMatrix(assemble_stiffness(mesh, Diffusion::scalar(1.0), 0.5) +
                                     assemble_weighted_mass(mesh, x2, mu, 0.5 * w,
                                                            disc.quadrature)),
                        mesh);
    op.b_matrix = apply_dirichlet(assemble_mass(mesh, 1.0), mesh);
    op.parameter.assign(mu.begin(), mu.end());
    return op;
  };
  spec.analytic_eigenvalue = [](std::span<const int> n, std::span<const double> mu)
  { return (n[0] + 0.5) * mu[0]; };
  return spec;
}

ProblemSpec ho2d_spec()
{
  ProblemSpec spec;
  spec.id = ProblemId::Ho2d;
  spec.domain = {2, -kPi / 2, kPi / 2, -kPi / 2, kPi / 2};
  spec.parameter_box = {{1.0}, {9.0}};
  spec.assemble = [](const Mesh &mesh, std::span<const double> mu, const Discretization &disc)
  {
    const double w = mu[0] * mu[0];
    AssembledOperator op;
    op.a_matrix =
        apply_dirichlet(SparseMatrix(assemble_stiffness(mesh, Diffusion::scalar(1.0), 0.5) +
                                     assemble_weighted_mass(mesh, radius2, mu, 0.5 * w,
                                                            disc.quadrature)),
                        mesh);
    op.b_matrix = apply_dirichlet(assemble_mass(mesh, 1.0), mesh);
    op.parameter.assign(mu.begin(), mu.end());
    return op;
  };
  spec.analytic_eigenvalue = [](std::span<const int> n, std::span<const double> mu)
  { return (n[0] + n[1] + 1.0) * mu[0]; };
  return spec;
}

ProblemSpec nonlinear1d_spec()
{
  ProblemSpec spec;
  spec.id = ProblemId::Nonlinear1d;
  spec.domain = {1, 0.0, 1.0, 0.0, 0.0};
  spec.parameter_box = {{1.0}, {9.0}};
  spec.assemble = [](const Mesh &mesh, std::span<const double> mu, const Discretization &)
  {
    AssembledOperator op;
    op.a_matrix = apply_dirichlet(assemble_stiffness(mesh, Diffusion::scalar(1.0), 1.0), mesh);
    op.b_matrix = apply_dirichlet(assemble_mass(mesh, 1.0), mesh);
    op.parameter.assign(mu.begin(), mu.end());
    return op;
  };
  Nonlinearity nl;
  nl.g = [](double w) { return std::pow(std::abs(w), 7.0 / 3.0) * w; };
  nl.dg = [](double w) { return (10.0 / 3.0) * std::pow(std::abs(w), 7.0 / 3.0); };
  spec.nonlinearity = nl;
  return spec;
}

ProblemSpec nonaffine1p_spec()
{
  ProblemSpec spec;
  spec.id = ProblemId::Nonaffine1p;
  spec.domain = {2, 0.0, 1.0, 0.0, 1.0};
  spec.parameter_box = {{1.0}, {8.0}};
  spec.assemble = [](const Mesh &mesh, std::span<const double> mu, const Discretization &disc)
  {
    CoefficientField weight = [](const Point &x, std::span<const double> p)
    { return std::exp(-p[0] * radius2(x, p)); };
    AssembledOperator op;
    op.a_matrix = apply_dirichlet(assemble_stiffness(mesh, Diffusion::scalar(1.0), 1.0), mesh);
    op.b_matrix =
        apply_dirichlet(assemble_weighted_mass(mesh, weight, mu, 1.0, disc.quadrature), mesh);
    op.parameter.assign(mu.begin(), mu.end());
    return op;
  };
  return spec;
}

double interface_permittivity(const Point &x, std::span<const double> mu, double width)
{
  constexpr double left = 0.1, right = 0.2;
  const double d = x.x() - mu[0] * std::sin(mu[1] * kPi * x.y());
  if (d <= -width)
  {
    return left;
  }
  if (d >= width)
  {
    return right;
  }
  return left + (right - left) * 0.5 * (d + width) / width;
}

ProblemSpec interface2p_spec()
{
  ProblemSpec spec;
  spec.id = ProblemId::Interface2p;
  spec.domain = {2, -1.0, 1.0, -1.0, 1.0};
  spec.parameter_box = {{0.1, 1.0}, {0.2, 8.0}};
  spec.assemble = [](const Mesh &mesh, std::span<const double> mu, const Discretization &disc)
  {
    const double width = disc.interface_width * disc.h;
    CoefficientField eps = [width](const Point &x, std::span<const double> p)
    { return interface_permittivity(x, p, width); };
    AssembledOperator op;
    op.a_matrix = apply_dirichlet(assemble_stiffness(mesh, Diffusion::scalar(1.0), 1.0), mesh);
    op.b_matrix =
        apply_dirichlet(assemble_weighted_mass(mesh, eps, mu, 1.0, disc.quadrature), mesh);
    op.parameter.assign(mu.begin(), mu.end());
    return op;
  };
  return spec;
}

ProblemSpec crossing_spec()
{
  ProblemSpec spec;
  spec.id = ProblemId::Crossing;
  spec.domain = {2, -1.0, 1.0, -1.0, 1.0};
  spec.parameter_box = {{-0.9}, {0.9}};
  spec.assemble = [](const Mesh &mesh, std::span<const double> mu, const Discretization &)
  {
    Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
    d(0, 0) = 1.0;
    d(1, 1) = 1.0 + mu[0];
    AssembledOperator op;
    op.a_matrix =
        apply_dirichlet(assemble_stiffness(mesh, Diffusion::anisotropic(d), 1.0), mesh);
    op.b_matrix = apply_dirichlet(assemble_mass(mesh, 1.0), mesh);
    op.parameter.assign(mu.begin(), mu.end());
    return op;
  };
  spec.analytic_eigenvalue = [](std::span<const int> n, std::span<const double> mu)
  { return kPi * kPi / 4.0 * (n[0] * n[0] + (1.0 + mu[0]) * n[1] * n[1]); };
  return spec;
}

ProblemSpec problem_spec(ProblemId id)
{
  switch (id)
  {
    case ProblemId::Ho1d:
      return ho1d_spec();
    case ProblemId::Ho2d:
      return ho2d_spec();
    case ProblemId::Nonlinear1d:
      return nonlinear1d_spec();
    case ProblemId::Nonaffine1p:
      return nonaffine1p_spec();
    case ProblemId::Interface2p:
      return interface2p_spec();
    case ProblemId::Crossing:
      return crossing_spec();
  }
  detail::Throw<InvalidInput>("unknown problem id");
}

}  // namespace eigenrom
