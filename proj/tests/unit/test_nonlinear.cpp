// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <doctest.h>
#include "eigenrom/eigensolve.hpp"
#include "eigenrom/error.hpp"
#include "eigenrom/nonlinear.hpp"

using namespace eigenrom;

namespace
{

NonlinearSystem system_at(double h)
{
  Discretization disc;
  disc.h = h;
  return make_nonlinear_system(nonlinear1d_spec(), disc);
}

NonlinearSystem linear_only(double h)
{
  NonlinearSystem sys = system_at(h);
  sys.nonlinearity.g = [](double) { return 0.0; };
  sys.nonlinearity.dg = [](double) { return 0.0; };
  return sys;
}

double a1_frobenius(const NonlinearSystem &sys)
{
  return Eigen::MatrixXd(sys.linear).norm();
}

}  // namespace

TEST_CASE("exact linear eigenpair is a Newton fixed point when g vanishes")
{
  const NonlinearSystem sys = linear_only(0.05);
  const Eigenpair lin = solve_generalized(sys.linear, sys.mass, 1)[0];
  NewtonState state{lin.vector, lin.value, 0, 0.0};
  const NewtonState next = newton_step(state, 3.0, sys);
  CHECK((next.u - lin.vector).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK(std::abs(next.lambda - lin.value) <= 1e-10 * lin.value);
  CHECK(next.residual <= 1e-10);
  CHECK(next.iteration == 1);
}

TEST_CASE("normalization defect shrinks quadratically when g vanishes")
{
  const NonlinearSystem sys = linear_only(0.05);
  const Eigenpair lin = fix_sign(solve_generalized(sys.linear, sys.mass, 1)[0]);
  NewtonState state{1.3 * lin.vector, lin.value, 0, 0.0};
  auto defect = [&](const NewtonState &s) { return std::abs(s.u.dot(sys.mass * s.u) - 1.0); };
  const double e0 = defect(state);
  const NewtonState s1 = newton_step(state, 2.0, sys);
  const NewtonState s2 = newton_step(s1, 2.0, sys);
  const double e1 = defect(s1), e2 = defect(s2);
  CHECK(e1 < e0);
  CHECK(e1 <= e0 * e0);
  CHECK(e2 <= e1 * e1 + 1e-14);
  const NonlinearSolution done = solve_nonlinear(2.0, sys, Eigenpair{lin.value, 1.3 * lin.vector, 0});
  CHECK((done.pair.vector - lin.vector).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(done.pair.value == doctest::Approx(lin.value).epsilon(1e-12));
}

TEST_CASE("Newton reproduces the reference table at h = 0.01")
{
  const NonlinearSystem sys = system_at(0.01);
  const double norm_a1 = a1_frobenius(sys);
  struct Row
  {
    double mu, lambda;
  };
  for (Row row : {Row{1.5, 13.4553}, Row{2.5, 19.5367}})
  {
    const NonlinearSolution sol = solve_nonlinear(row.mu, sys);
    CHECK(std::abs(sol.pair.value - row.lambda) <= 5e-3);
    CHECK(sol.iterations <= 15);
    CHECK(nonlinear_residual(sys, row.mu, sol.pair) <= 1e-8 * norm_a1);
    CHECK(std::abs(sol.pair.vector.dot(sys.mass * sol.pair.vector) - 1.0) <= 1e-10);
  }
}

TEST_CASE("small mu recovers the linear limit")
{
  const NonlinearSystem sys = system_at(0.01);
  const NonlinearSolution sol = solve_nonlinear(1e-8, sys);
  const double lin = solve_generalized(sys.linear, sys.mass, 1)[0].value;
  CHECK(sol.pair.value == doctest::Approx(lin).epsilon(1e-12));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(sol.pair.value - pi2) <= 1e-3);
}

TEST_CASE("Newton converges quadratically at mu = 2.5")
{
  const NonlinearSystem sys = system_at(0.01);
  const NonlinearSolution sol = solve_nonlinear(2.5, sys);
  const auto &r = sol.residuals;
  REQUIRE(r.size() >= 3);
  int checked = 0;
  for (size_t k = 0; k + 1 < r.size(); k++)
  {
    if (r[k] < 1e-3 && r[k + 1] > 1e-11)
    {
      INFO("r_k = ", r[k], " r_k+1 = ", r[k + 1]);
      CHECK(r[k + 1] <= 50.0 * r[k] * r[k]);
      checked++;
    }
  }
  CHECK(checked >= 1);
}

TEST_CASE("continuation from a neighbouring parameter")
{
  const NonlinearSystem sys = system_at(0.01);
  const NonlinearSolution base = solve_nonlinear(2.5, sys);
  const NonlinearSolution next = solve_nonlinear(2.6, sys, base.pair);
  CHECK(next.iterations <= 5);
  CHECK(next.pair.value > base.pair.value);
  CHECK(nonlinear_residual(sys, 2.6, next.pair) <= 1e-8 * a1_frobenius(sys));
}

TEST_CASE("ground-state eigenvalue increases strictly along the parameter box")
{
  const NonlinearSystem sys = system_at(0.02);
  std::optional<Eigenpair> prev;
  double last = 0.0;
  for (double mu = 1.0; mu <= 9.0 + 1e-12; mu += 0.5)
  {
    const NonlinearSolution sol = solve_nonlinear(mu, sys, prev);
    CHECK(sol.pair.value > last);
    CHECK(sol.iterations <= 15);
    last = sol.pair.value;
    prev = sol.pair;
  }
}

TEST_CASE("Newton failures are reported")
{
  const NonlinearSystem sys = system_at(0.05);
  NewtonState zero{Eigen::VectorXd::Zero(sys.mass.rows()), 1.0, 0, 0.0};
  CHECK_THROWS_AS(newton_step(zero, 2.0, sys), InvalidInput);
  CHECK_THROWS_AS(solve_nonlinear(2.0, sys, std::nullopt, 1e-10, 1), NumericalFailure);
  CHECK_THROWS_AS(solve_nonlinear(2.0, sys, std::nullopt, 0.0), InvalidInput);
  Discretization disc;
  CHECK_THROWS_AS(make_nonlinear_system(ho1d_spec(), disc), InvalidInput);
}
