// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/nonlinear.hpp"

#include <cmath>
#include <Eigen/LU>
#include "eigenrom/error.hpp"

namespace eigenrom
{

NonlinearSystem make_nonlinear_system(const ProblemSpec &spec, const Discretization &disc)
{
  EIGENROM_VERIFY(spec.nonlinearity.has_value(), InvalidInput, "problem ", spec.name(),
                  " has no nonlinearity");
  NonlinearSystem sys;
  sys.mesh = spec.build_mesh(disc);
  const double mu0 = spec.parameter_box.lo[0];
  const AssembledOperator op = spec.assemble(sys.mesh, std::span<const double>(&mu0, 1), disc);
  sys.linear = op.a_matrix;
  sys.mass = op.b_matrix;
  sys.nonlinearity = *spec.nonlinearity;
  sys.quadrature = disc.quadrature;
  return sys;
}

NewtonState newton_step(const NewtonState &state, double mu, const NonlinearSystem &system)
{
  const int n = static_cast<int>(system.linear.rows());
  EIGENROM_VERIFY(state.u.size() == n, InvalidInput, "state has ", state.u.size(),
                  " entries, system has ", n);
  EIGENROM_VERIFY(state.u.lpNorm<Eigen::Infinity>() > 0.0, InvalidInput,
                  "Newton state must be nonzero");

  const double mu2 = mu * mu;
  const NonlinearTerms nl = assemble_nonlinear_terms(system.mesh, state.u, system.nonlinearity.g,
                                                     system.nonlinearity.dg, system.quadrature);
  const Eigen::VectorXd c = system.mass * state.u;
  const double s = state.u.dot(c);

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) =
      Eigen::MatrixXd(system.linear + mu2 * nl.jacobian - state.lambda * system.mass);
  k.block(0, n, n, 1) = -c;
  k.block(n, 0, 1, n) = 2.0 * c.transpose();

  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = state.lambda * c - system.linear * state.u - mu2 * nl.load;
  rhs(n) = 1.0 - s;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
  const double rcond = lu.rcond();
  EIGENROM_VERIFY(rcond > 1e-15, NumericalFailure, "bordered Newton matrix is singular (rcond ",
                  rcond, ") at mu = ", mu, ", iteration ", state.iteration + 1);
  const Eigen::VectorXd step = lu.solve(rhs);
  EIGENROM_VERIFY(step.allFinite(), NumericalFailure, "Newton step is not finite at mu = ", mu);

  NewtonState next;
  next.u = state.u + step.head(n);
  next.lambda = state.lambda + step(n);
  next.iteration = state.iteration + 1;
  next.residual = std::abs(step(n)) + step.head(n).lpNorm<Eigen::Infinity>();
  return next;
}

NonlinearSolution solve_nonlinear(double mu, const NonlinearSystem &system,
                                  const std::optional<Eigenpair> &init, double tol, int max_iter)
{
  EIGENROM_VERIFY(tol > 0.0, InvalidInput, "Newton tolerance must be positive");
  EIGENROM_VERIFY(max_iter >= 1, InvalidInput, "Newton needs at least one iteration");

  Eigenpair start;
  if (init)
  {
    start = *init;
  }
  else
  {
    start = fix_sign(solve_generalized(system.linear, system.mass, 1).front());
  }

  NonlinearSolution out;
  NewtonState state{start.vector, start.value, 0, 0.0};
  while (true)
  {
    state = newton_step(state, mu, system);
    out.residuals.push_back(state.residual);
    if (state.residual < tol)
    {
      break;
    }
    EIGENROM_VERIFY(state.iteration < max_iter, NumericalFailure, "Newton did not converge at mu = ",
                    mu, " after ", max_iter, " iterations (last residual ", state.residual, ")");
  }
  out.iterations = state.iteration;
  out.pair.value = state.lambda;
  out.pair.vector = state.u;
  out.pair.index = 0;
  return out;
}

double nonlinear_residual(const NonlinearSystem &system, double mu, const Eigenpair &pair)
{
  const NonlinearTerms nl = assemble_nonlinear_terms(system.mesh, pair.vector, system.nonlinearity.g,
                                                     system.nonlinearity.dg, system.quadrature);
  return (system.linear * pair.vector + mu * mu * nl.load -
          pair.value * (system.mass * pair.vector))
      .norm();
}

}  // namespace eigenrom
