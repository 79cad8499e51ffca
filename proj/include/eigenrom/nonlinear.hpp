// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_NONLINEAR_HPP
#define EIGENROM_NONLINEAR_HPP

#include <optional>
#include <vector>
#include <Eigen/Dense>
#include "eigenrom/eigensolve.hpp"
#include "eigenrom/problems.hpp"

namespace eigenrom
{

//
// Discrete problem A1 u + mu^2 g(u) = lambda M u with u^T M u = 1, assembled once
// for a mesh.
//
struct NonlinearSystem
{
  Mesh mesh;
  SparseMatrix linear;  // A1
  SparseMatrix mass;    // M
  Nonlinearity nonlinearity;
  QuadratureRule quadrature = QuadratureRule::Gauss;
};

NonlinearSystem make_nonlinear_system(const ProblemSpec &spec, const Discretization &disc);

struct NewtonState
{
  Eigen::VectorXd u;
  double lambda = 0.0;
  int iteration = 0;
  double residual = 0.0;  // |d lambda| + ||d u||_inf of the last step
};

// One Newton update via the bordered system, solved by dense LU with partial pivoting.
NewtonState newton_step(const NewtonState &state, double mu, const NonlinearSystem &system);

struct NonlinearSolution
{
  Eigenpair pair;
  int iterations = 0;
  std::vector<double> residuals;  // one per step
};

// Newton iteration from init, or from the linear ground state when init is absent.
NonlinearSolution solve_nonlinear(double mu, const NonlinearSystem &system,
                                  const std::optional<Eigenpair> &init = std::nullopt,
                                  double tol = 1e-10, int max_iter = 50);

// ||A1 u + mu^2 g(u) - lambda M u||_2.
double nonlinear_residual(const NonlinearSystem &system, double mu, const Eigenpair &pair);

}  // namespace eigenrom

#endif  // EIGENROM_NONLINEAR_HPP
