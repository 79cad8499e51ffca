// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>
#include <doctest.h>
#include <Eigen/LU>
#include "eigenrom/eigensolve.hpp"
#include "eigenrom/error.hpp"
#include "eigenrom/problems.hpp"
#include "eigenrom/rng.hpp"

using namespace eigenrom;

namespace
{

Eigen::MatrixXd random_matrix(SplitMix64 &rng, int n)
{
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; i++)
  {
    for (int j = 0; j < n; j++)
    {
      g(i, j) = rng.Uniform(-1.0, 1.0);
    }
  }
  return g;
}

// All eigenvalues of (A, B) by inverse iteration with B-orthogonal deflation, each
// one polished by Rayleigh quotient iteration.
std::vector<double> deflation_oracle(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                                     SplitMix64 &rng)
{
  const int n = static_cast<int>(a.rows());
  std::vector<Eigen::VectorXd> found;
  std::vector<double> values;
  const Eigen::PartialPivLU<Eigen::MatrixXd> a_lu(a);
  auto deflate = [&](Eigen::VectorXd &x)
  {
    for (int pass = 0; pass < 2; pass++)
    {
      for (const auto &v : found)
      {
        x -= v.dot(b * x) * v;
      }
    }
    x /= std::sqrt(x.dot(b * x));
  };
  for (int j = 0; j < n; j++)
  {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; i++)
    {
      x(i) = rng.Uniform(-1.0, 1.0);
    }
    deflate(x);
    for (int it = 0; it < 200; it++)
    {
      x = a_lu.solve(b * x);
      deflate(x);
    }
    double rho = x.dot(a * x);
    for (int it = 0; it < 50; it++)
    {
      const Eigen::MatrixXd shifted = a - rho * b;
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
      Eigen::VectorXd y = lu.solve(b * x);
      if (!y.allFinite())
      {
        break;
      }
      deflate(y);
      const double next = y.dot(a * y);
      x = y;
      if (std::abs(next - rho) <= 1e-15 * std::max(1.0, std::abs(next)))
      {
        rho = next;
        break;
      }
      rho = next;
    }
    found.push_back(x);
    values.push_back(rho);
  }
  std::sort(values.begin(), values.end());
  return values;
}

// Characteristic polynomial det(K - lambda M) of the 3x3 pencil, expanded by hand.
double det3(const Eigen::Matrix3d &m)
{
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

}  // namespace

TEST_CASE("1x1 pencil")
{
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 2.0;
  b << 1.0;
  const auto pairs = solve_generalized(a, b, 1);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(pairs[0].vector(0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pairs[0].index == 0);
}

TEST_CASE("1D Laplacian at h = 0.25 matches the characteristic polynomial root")
{
  const double h = 0.25;
  Eigen::Matrix3d k, m;
  k << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  k /= h;
  m << 4, 1, 0, 1, 4, 1, 0, 1, 4;
  m *= h / 6;

  // Bisection on the first sign change of det(K - lambda M).
  double lo = 0.0, hi = 0.0;
  const double f0 = det3(k);
  for (double x = 0.1; x < 100.0; x += 0.1)
  {
    if ((det3(k - x * m) > 0) != (f0 > 0))
    {
      hi = x;
      lo = x - 0.1;
      break;
    }
  }
  REQUIRE(hi > 0.0);
  for (int it = 0; it < 200; it++)
  {
    const double mid = 0.5 * (lo + hi);
    ((det3(k - mid * m) > 0) == (f0 > 0) ? lo : hi) = mid;
  }

  const auto pairs = solve_generalized(Eigen::MatrixXd(k), Eigen::MatrixXd(m), 1);
  CHECK(pairs[0].value == doctest::Approx(lo).epsilon(1e-12));
  // Closed form for the tridiagonal Toeplitz pencil, first mode theta = pi h.
  const double c = std::cos(std::acos(-1.0) * h);
  CHECK(pairs[0].value == doctest::Approx((2.0 / h) * (1 - c) / ((h / 6) * (4 + 2 * c))).epsilon(1e-12));
}

TEST_CASE("200 random pencils against the deflation oracle")
{
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; trial++)
  {
    const int n = 1 + static_cast<int>(rng.Below(20));
    const Eigen::MatrixXd ga = random_matrix(rng, n), gb = random_matrix(rng, n);
    const Eigen::MatrixXd a = 0.5 * (ga + ga.transpose());
    const Eigen::MatrixXd b = gb * gb.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    const auto pairs = solve_generalized(a, b, n);
    const auto oracle = deflation_oracle(a, b, rng);
    REQUIRE(pairs.size() == static_cast<size_t>(n));
    for (int i = 0; i < n; i++)
    {
      const double ref = oracle[i];
      CHECK(std::abs(pairs[i].value - ref) <= 1e-8 * std::max(std::abs(ref), a.norm() * 1e-3));
      CHECK(pairs[i].index == i);
      const Eigen::VectorXd &u = pairs[i].vector;
      CHECK(std::abs(u.dot(b * u) - 1.0) <= 1e-10);
      CHECK((a * u - pairs[i].value * (b * u)).norm() <=
            1e-8 * (a.norm() + std::abs(pairs[i].value) * b.norm()));
      for (int j = 0; j < i; j++)
      {
        CHECK(std::abs(u.dot(b * pairs[j].vector)) <= 1e-8);
      }
      if (i > 0)
      {
        CHECK(pairs[i].value >= pairs[i - 1].value);
      }
    }
  }
}

TEST_CASE("identity mass reproduces the standard symmetric path and Eigen")
{
  SplitMix64 rng(11);
  for (int n : {1, 2, 7, 30})
  {
    const Eigen::MatrixXd g = random_matrix(rng, n);
    const Eigen::MatrixXd a = g + g.transpose();
    const SymmetricEigen standard = symmetric_eigen(a);
    const auto pairs = solve_generalized(a, Eigen::MatrixXd::Identity(n, n), n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    for (int i = 0; i < n; i++)
    {
      CHECK(std::abs(pairs[i].value - standard.values(i)) <= 1e-12 * std::max(1.0, a.norm()));
      CHECK(std::abs(standard.values(i) - ref.eigenvalues()(i)) <= 1e-12 * std::max(1.0, a.norm()));
    }
    const Eigen::MatrixXd &v = standard.vectors;
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((a * v - v * standard.values.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-11 * a.norm());
  }
}

TEST_CASE("bad input is rejected")
{
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
  indefinite(2, 2) = -1.0;
  try
  {
    solve_generalized(a, indefinite, 1);
    FAIL("indefinite B accepted");
  }
  catch (const NumericalFailure &e)
  {
    CHECK(std::string(e.what()).find("B not positive definite") != std::string::npos);
  }
  Eigen::MatrixXd nonsym = a;
  nonsym(0, 1) = 0.5;
  CHECK_THROWS_AS(solve_generalized(nonsym, a, 1), InvalidInput);
  CHECK_THROWS_AS(solve_generalized(a, a, 0), InvalidInput);
  CHECK_THROWS_AS(solve_generalized(a, a, 4), InvalidInput);
  CHECK_THROWS_AS(solve_generalized(a, Eigen::MatrixXd::Identity(2, 2), 1), InvalidInput);

  SparseMatrix sa(SparseMatrix(a.sparseView())), sb(SparseMatrix(indefinite.sparseView()));
  CHECK_THROWS_AS(solve_generalized(sa, sb, 1), NumericalFailure);
}

TEST_CASE("fix_sign")
{
  Eigenpair p;
  p.vector = Eigen::Vector2d(-3.0, 1.0);
  CHECK(fix_sign(p).vector == Eigen::Vector2d(3.0, -1.0));
  p.vector = Eigen::Vector2d(2.0, -2.0);
  CHECK(fix_sign(p).vector == Eigen::Vector2d(2.0, -2.0));
  p.vector = Eigen::Vector2d(-2.0, 2.0);
  CHECK(fix_sign(p).vector == Eigen::Vector2d(2.0, -2.0));

  p.vector = Eigen::Vector2d(1.0, 0.0);
  const Eigen::Vector2d ref(-1.0, 0.0);
  CHECK(fix_sign(p, ref).vector == Eigen::Vector2d(-1.0, 0.0));

  SplitMix64 rng(5);
  for (int t = 0; t < 20; t++)
  {
    Eigenpair q;
    q.vector = Eigen::VectorXd::NullaryExpr(6, [&] { return rng.Uniform(-1.0, 1.0); });
    const Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(6, [&] { return rng.Uniform(-1.0, 1.0); });
    const Eigenpair once = fix_sign(q, r);
    CHECK(fix_sign(once, r).vector == once.vector);
    CHECK(fix_sign(fix_sign(q)).vector == fix_sign(q).vector);
    CHECK((once.vector - r).norm() <= (-once.vector - r).norm());
  }
  CHECK_THROWS_AS(fix_sign(p, Eigen::Vector3d::Zero()), InvalidInput);
}

TEST_CASE("sparse subspace iteration agrees with the dense path")
{
  Discretization disc;
  disc.h = 0.1;
  const ProblemSpec spec = crossing_spec();
  const Mesh mesh = spec.build_mesh(disc);
  for (double mu : {0.25, 0.0})
  {
    const std::vector<double> p = {mu};
    const AssembledOperator op = spec.assemble(mesh, p, disc);
    REQUIRE(op.a_matrix.rows() > SparseEigenOptions{}.dense_limit);
    const int k = 6;
    const auto sparse = solve_generalized(op.a_matrix, op.b_matrix, k);
    const auto dense =
        solve_generalized(Eigen::MatrixXd(op.a_matrix), Eigen::MatrixXd(op.b_matrix), k);
    const double af = Eigen::MatrixXd(op.a_matrix).norm(), bf = Eigen::MatrixXd(op.b_matrix).norm();
    for (int i = 0; i < k; i++)
    {
      CHECK(std::abs(sparse[i].value - dense[i].value) <= 1e-10 * dense[i].value);
      const Eigen::VectorXd &u = sparse[i].vector;
      CHECK(std::abs(u.dot(op.b_matrix * u) - 1.0) <= 1e-10);
      CHECK(eigen_residual(op.a_matrix, op.b_matrix, sparse[i]) <=
            1e-8 * (af + std::abs(sparse[i].value) * bf));
      for (int j = 0; j < i; j++)
      {
        CHECK(std::abs(u.dot(op.b_matrix * sparse[j].vector)) <= 1e-8);
      }
    }
    // Simple eigenvalues: vectors agree up to sign.
    for (int i = 0; i < k; i++)
    {
      const bool simple = (i == 0 || sparse[i].value - sparse[i - 1].value > 1e-6) &&
                          (i + 1 == k || sparse[i + 1].value - sparse[i].value > 1e-6);
      if (simple)
      {
        const Eigen::VectorXd a = fix_sign(sparse[i], dense[i].vector).vector, b = dense[i].vector;
        CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-7);
      }
    }
  }
}

TEST_CASE("sparse path is deterministic")
{
  Discretization disc;
  disc.h = 0.1;
  const ProblemSpec spec = nonaffine1p_spec();
  const Mesh mesh = spec.build_mesh(disc);
  const std::vector<double> p = {3.0};
  const AssembledOperator op = spec.assemble(mesh, p, disc);
  const auto first = solve_generalized(op.a_matrix, op.b_matrix, 2);
  const auto second = solve_generalized(op.a_matrix, op.b_matrix, 2);
  for (int i = 0; i < 2; i++)
  {
    CHECK(first[i].value == second[i].value);
    CHECK(first[i].vector == second[i].vector);
  }
}
