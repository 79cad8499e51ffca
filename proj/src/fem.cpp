// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/fem.hpp"

#include <array>
#include <cmath>
#include "eigenrom/error.hpp"

namespace eigenrom
{

namespace
{

using Triplets = std::vector<Eigen::Triplet<double>>;

struct QuadPoint
{
  std::array<double, 3> bary;
  double weight;  // relative to the element measure
};

const std::vector<QuadPoint> &gauss_points(int dim)
{
  static const std::vector<QuadPoint> line = []
  {
    const double xi[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                          0.8611363115940526};
    const double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                         0.3478548451374538};
    std::vector<QuadPoint> pts;
    for (int q = 0; q < 4; q++)
    {
      const double t = 0.5 * (1.0 + xi[q]);
      pts.push_back({{1.0 - t, t, 0.0}, 0.5 * w[q]});
    }
    return pts;
  }();
  static const std::vector<QuadPoint> tri = {{{0.5, 0.5, 0.0}, 1.0 / 3.0},
                                             {{0.0, 0.5, 0.5}, 1.0 / 3.0},
                                             {{0.5, 0.0, 0.5}, 1.0 / 3.0}};
  return dim == 1 ? line : tri;
}

// Exact P1 mass entry (phi_i, phi_j) divided by the element measure.
double mass_factor(int dim, int i, int j)
{
  if (dim == 1)
  {
    return (i == j) ? 1.0 / 3.0 : 1.0 / 6.0;
  }
  return (i == j) ? 1.0 / 6.0 : 1.0 / 12.0;
}

Point map_point(const Mesh &mesh, int e, const std::array<double, 3> &bary)
{
  Point x = Point::Zero();
  for (int j = 0; j < mesh.nodes_per_element(); j++)
  {
    x += bary[j] * mesh.vertices[mesh.elements[e][j]];
  }
  return x;
}

SparseMatrix from_triplets(int n, const Triplets &t)
{
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Gradients of the barycentric basis on element e, one row per local node.
Eigen::Matrix<double, 3, 2> basis_gradients(const Mesh &mesh, int e)
{
  Eigen::Matrix<double, 3, 2> g = Eigen::Matrix<double, 3, 2>::Zero();
  const auto &el = mesh.elements[e];
  if (mesh.dim == 1)
  {
    const double len = mesh.signed_measure(e);
    g(0, 0) = -1.0 / len;
    g(1, 0) = 1.0 / len;
    return g;
  }
  Eigen::Matrix2d jac;
  jac.col(0) = mesh.vertices[el[1]] - mesh.vertices[el[0]];
  jac.col(1) = mesh.vertices[el[2]] - mesh.vertices[el[0]];
  const Eigen::Matrix2d inv = jac.inverse();
  g.row(1) = inv.row(0);
  g.row(2) = inv.row(1);
  g.row(0) = -(g.row(1) + g.row(2));
  return g;
}

}  // namespace

std::string to_string(QuadratureRule rule)
{
  return rule == QuadratureRule::Gauss ? "gauss" : "centroid";
}

QuadratureRule quadrature_rule_from_string(const std::string &name)
{
  if (name == "gauss")
  {
    return QuadratureRule::Gauss;
  }
  if (name == "centroid")
  {
    return QuadratureRule::Centroid;
  }
  detail::Throw<InvalidInput>("unknown quadrature rule \"", name, "\"");
}

Diffusion Diffusion::scalar(double value)
{
  Diffusion d;
  d.tensor = value * Eigen::Matrix2d::Identity();
  return d;
}

Diffusion Diffusion::anisotropic(const Eigen::Matrix2d &tensor)
{
  Diffusion d;
  d.tensor = tensor;
  return d;
}

SparseMatrix assemble_stiffness(const Mesh &mesh, const Diffusion &diffusion, double scale)
{
  const Eigen::Matrix2d &D = diffusion.tensor;
  if (mesh.dim == 1)
  {
    EIGENROM_VERIFY(D(0, 0) > 0.0, InvalidInput, "diffusion coefficient must be positive");
  }
  else
  {
    EIGENROM_VERIFY(std::abs(D(0, 1) - D(1, 0)) <= 1e-14 * D.norm(), InvalidInput,
                    "diffusion tensor is not symmetric");
    EIGENROM_VERIFY(D(0, 0) > 0.0 && D.determinant() > 0.0, InvalidInput,
                    "diffusion tensor is not positive definite");
  }

  const int npe = mesh.nodes_per_element();
  Triplets t;
  t.reserve(static_cast<size_t>(mesh.num_elements()) * npe * npe);
  for (int e = 0; e < mesh.num_elements(); e++)
  {
    const auto g = basis_gradients(mesh, e);
    const double meas = mesh.signed_measure(e);
    for (int i = 0; i < npe; i++)
    {
      for (int j = 0; j < npe; j++)
      {
        const double kij = (mesh.dim == 1) ? D(0, 0) * g(i, 0) * g(j, 0)
                                           : g.row(i).dot(D * g.row(j).transpose());
        t.emplace_back(mesh.elements[e][i], mesh.elements[e][j], scale * meas * kij);
      }
    }
  }
  return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix assemble_mass(const Mesh &mesh, double scale)
{
  const int npe = mesh.nodes_per_element();
  Triplets t;
  t.reserve(static_cast<size_t>(mesh.num_elements()) * npe * npe);
  for (int e = 0; e < mesh.num_elements(); e++)
  {
    const double meas = mesh.signed_measure(e);
    for (int i = 0; i < npe; i++)
    {
      for (int j = 0; j < npe; j++)
      {
        t.emplace_back(mesh.elements[e][i], mesh.elements[e][j],
                       scale * meas * mass_factor(mesh.dim, i, j));
      }
    }
  }
  return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix assemble_weighted_mass(const Mesh &mesh, const CoefficientField &field,
                                    std::span<const double> mu, double scale,
                                    QuadratureRule rule)
{
  const int npe = mesh.nodes_per_element();
  const auto &pts = gauss_points(mesh.dim);
  const std::array<double, 3> centre = (mesh.dim == 1)
                                           ? std::array<double, 3>{0.5, 0.5, 0.0}
                                           : std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3};
  Triplets t;
  t.reserve(static_cast<size_t>(mesh.num_elements()) * npe * npe);
  for (int e = 0; e < mesh.num_elements(); e++)
  {
    const double meas = mesh.signed_measure(e);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    if (rule == QuadratureRule::Gauss)
    {
      for (const auto &q : pts)
      {
        const double f = field(map_point(mesh, e, q.bary), mu);
        EIGENROM_VERIFY(std::isfinite(f), NumericalFailure,
                        "coefficient field is not finite on element ", e);
        for (int i = 0; i < npe; i++)
        {
          for (int j = 0; j < npe; j++)
          {
            local(i, j) += q.weight * f * q.bary[i] * q.bary[j];
          }
        }
      }
    }
    else
    {
      const double f = field(map_point(mesh, e, centre), mu);
      EIGENROM_VERIFY(std::isfinite(f), NumericalFailure,
                      "coefficient field is not finite on element ", e);
      for (int i = 0; i < npe; i++)
      {
        for (int j = 0; j < npe; j++)
        {
          local(i, j) = f * mass_factor(mesh.dim, i, j);
        }
      }
    }
    for (int i = 0; i < npe; i++)
    {
      for (int j = 0; j < npe; j++)
      {
        t.emplace_back(mesh.elements[e][i], mesh.elements[e][j], scale * meas * local(i, j));
      }
    }
  }
  return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix apply_dirichlet(const SparseMatrix &full, const Mesh &mesh)
{
  EIGENROM_VERIFY(full.rows() == mesh.num_vertices() && full.cols() == mesh.num_vertices(),
                  InvalidInput, "matrix is ", full.rows(), "x", full.cols(), ", mesh has ",
                  mesh.num_vertices(), " vertices");
  Triplets t;
  t.reserve(full.nonZeros());
  for (int k = 0; k < full.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(full, k); it; ++it)
    {
      const int r = mesh.dof_of_vertex[it.row()];
      const int c = mesh.dof_of_vertex[it.col()];
      if (r >= 0 && c >= 0)
      {
        t.emplace_back(r, c, it.value());
      }
    }
  }
  return from_triplets(mesh.num_dofs(), t);
}

NonlinearTerms assemble_nonlinear_terms(const Mesh &mesh, const Eigen::VectorXd &u_interior,
                                        const std::function<double(double)> &g,
                                        const std::function<double(double)> &dg,
                                        QuadratureRule rule)
{
  const Eigen::VectorXd u = mesh.extend(u_interior);
  const int npe = mesh.nodes_per_element();
  const auto &pts = gauss_points(mesh.dim);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_vertices());
  Triplets t;
  t.reserve(static_cast<size_t>(mesh.num_elements()) * npe * npe);
  for (int e = 0; e < mesh.num_elements(); e++)
  {
    const auto &el = mesh.elements[e];
    const double meas = mesh.signed_measure(e);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    if (rule == QuadratureRule::Gauss)
    {
      for (const auto &q : pts)
      {
        double uq = 0.0;
        for (int j = 0; j < npe; j++)
        {
          uq += q.bary[j] * u(el[j]);
        }
        const double gq = g(uq), dq = dg(uq);
        for (int i = 0; i < npe; i++)
        {
          load(el[i]) += meas * q.weight * gq * q.bary[i];
          for (int j = 0; j < npe; j++)
          {
            local(i, j) += q.weight * dq * q.bary[i] * q.bary[j];
          }
        }
      }
    }
    else
    {
      double ubar = 0.0;
      for (int j = 0; j < npe; j++)
      {
        ubar += u(el[j]) / npe;
      }
      const double gq = g(ubar), dq = dg(ubar);
      for (int i = 0; i < npe; i++)
      {
        load(el[i]) += meas * gq / npe;
        for (int j = 0; j < npe; j++)
        {
          local(i, j) = dq * mass_factor(mesh.dim, i, j);
        }
      }
    }
    for (int i = 0; i < npe; i++)
    {
      for (int j = 0; j < npe; j++)
      {
        t.emplace_back(el[i], el[j], meas * local(i, j));
      }
    }
  }
  NonlinearTerms out;
  out.load = mesh.restrict(load);
  out.jacobian = apply_dirichlet(from_triplets(mesh.num_vertices(), t), mesh);
  return out;
}

}  // namespace eigenrom
