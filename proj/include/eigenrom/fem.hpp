// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_FEM_HPP
#define EIGENROM_FEM_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include "eigenrom/mesh.hpp"

namespace eigenrom
{

using SparseMatrix = Eigen::SparseMatrix<double>;

// Quadrature used for variable-coefficient terms.
enum class QuadratureRule
{
  Gauss,     // 4-point Gauss-Legendre per interval, 3-point mid-edge per triangle
  Centroid   // coefficient frozen at the element centroid, exact P1 mass
};

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(const std::string &name);

// Constant diffusion tensor; 1D meshes use the (0, 0) entry.
struct Diffusion
{
  Eigen::Matrix2d tensor = Eigen::Matrix2d::Identity();

  static Diffusion scalar(double value);
  static Diffusion anisotropic(const Eigen::Matrix2d &tensor);
};

// Coefficient evaluated at quadrature points: (point, parameter) -> value.
using CoefficientField = std::function<double(const Point &, std::span<const double>)>;

//
// Parametric operator pair restricted to interior dofs: A(mu) u = lambda B(mu) u.
//
struct AssembledOperator
{
  SparseMatrix a_matrix;
  SparseMatrix b_matrix;
  std::vector<double> parameter;
};

// scale * (D grad phi_j, grad phi_i) over all vertices.
SparseMatrix assemble_stiffness(const Mesh &mesh, const Diffusion &diffusion, double scale);

// Exact consistent mass, scale * (phi_j, phi_i), over all vertices.
SparseMatrix assemble_mass(const Mesh &mesh, double scale);

// scale * (f(x; mu) phi_j, phi_i) over all vertices.
SparseMatrix assemble_weighted_mass(const Mesh &mesh, const CoefficientField &field,
                                    std::span<const double> mu, double scale,
                                    QuadratureRule rule = QuadratureRule::Gauss);

// Delete boundary rows and columns; rows follow mesh.vertex_of_dof.
SparseMatrix apply_dirichlet(const SparseMatrix &full, const Mesh &mesh);

//
// Nodal quadrature terms of a pointwise nonlinearity g applied to a P1 field u:
// load_i = (g(u), phi_i) and jacobian_ij = (g'(u) phi_j, phi_i), interior dofs only.
//
struct NonlinearTerms
{
  Eigen::VectorXd load;
  SparseMatrix jacobian;
};

NonlinearTerms assemble_nonlinear_terms(const Mesh &mesh, const Eigen::VectorXd &u_interior,
                                        const std::function<double(double)> &g,
                                        const std::function<double(double)> &dg,
                                        QuadratureRule rule = QuadratureRule::Gauss);

}  // namespace eigenrom

#endif  // EIGENROM_FEM_HPP
