// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include "eigenrom/error.hpp"
#include "eigenrom/rng.hpp"

namespace eigenrom
{

namespace
{

// Householder reduction of the symmetric matrix held in v to tridiagonal form.
// On exit d is the diagonal, e the subdiagonal (e(0) = 0) and v the accumulated
// orthogonal transformation.
void tridiagonalize(Eigen::MatrixXd &v, Eigen::VectorXd &d, Eigen::VectorXd &e)
{
  const int n = static_cast<int>(v.rows());
  d.resize(n);
  e.setZero(n);
  for (int j = 0; j < n; j++)
  {
    d(j) = v(n - 1, j);
  }
  for (int i = n - 1; i > 0; i--)
  {
    double scale = 0.0, h = 0.0;
    for (int k = 0; k < i; k++)
    {
      scale += std::abs(d(k));
    }
    if (scale == 0.0)
    {
      e(i) = d(i - 1);
      for (int j = 0; j < i; j++)
      {
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    }
    else
    {
      for (int k = 0; k < i; k++)
      {
        d(k) /= scale;
        h += d(k) * d(k);
      }
      double f = d(i - 1);
      double g = std::sqrt(h);
      if (f > 0.0)
      {
        g = -g;
      }
      e(i) = scale * g;
      h -= f * g;
      d(i - 1) = f - g;
      for (int j = 0; j < i; j++)
      {
        e(j) = 0.0;
      }
      for (int j = 0; j < i; j++)
      {
        f = d(j);
        v(j, i) = f;
        g = e(j) + v(j, j) * f;
        for (int k = j + 1; k <= i - 1; k++)
        {
          g += v(k, j) * d(k);
          e(k) += v(k, j) * f;
        }
        e(j) = g;
      }
      f = 0.0;
      for (int j = 0; j < i; j++)
      {
        e(j) /= h;
        f += e(j) * d(j);
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; j++)
      {
        e(j) -= hh * d(j);
      }
      for (int j = 0; j < i; j++)
      {
        f = d(j);
        g = e(j);
        for (int k = j; k <= i - 1; k++)
        {
          v(k, j) -= (f * e(k) + g * d(k));
        }
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d(i) = h;
  }

  // Accumulate the transformations.
  for (int i = 0; i < n - 1; i++)
  {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d(i + 1);
    if (h != 0.0)
    {
      for (int k = 0; k <= i; k++)
      {
        d(k) = v(k, i + 1) / h;
      }
      for (int j = 0; j <= i; j++)
      {
        double g = 0.0;
        for (int k = 0; k <= i; k++)
        {
          g += v(k, i + 1) * v(k, j);
        }
        for (int k = 0; k <= i; k++)
        {
          v(k, j) -= g * d(k);
        }
      }
    }
    for (int k = 0; k <= i; k++)
    {
      v(k, i + 1) = 0.0;
    }
  }
  for (int j = 0; j < n; j++)
  {
    d(j) = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e(0) = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of v.
void tridiagonal_ql(Eigen::MatrixXd &v, Eigen::VectorXd &d, Eigen::VectorXd &e)
{
  const int n = static_cast<int>(v.rows());
  for (int i = 1; i < n; i++)
  {
    e(i - 1) = e(i);
  }
  e(n - 1) = 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  const long max_sweeps = 30L * n;
  long sweeps = 0;
  double f = 0.0, tst1 = 0.0;
  for (int l = 0; l < n; l++)
  {
    tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
    int m = l;
    while (m < n - 1 && std::abs(e(m)) > eps * tst1)
    {
      m++;
    }
    if (m > l)
    {
      do
      {
        EIGENROM_VERIFY(++sweeps <= max_sweeps, NumericalFailure,
                        "tridiagonal QL did not converge after ", max_sweeps, " sweeps");
        double g = d(l);
        double p = (d(l + 1) - g) / (2.0 * e(l));
        double r = std::hypot(p, 1.0);
        if (p < 0.0)
        {
          r = -r;
        }
        d(l) = e(l) / (p + r);
        d(l + 1) = e(l) * (p + r);
        const double dl1 = d(l + 1);
        double h = g - d(l);
        for (int i = l + 2; i < n; i++)
        {
          d(i) -= h;
        }
        f += h;

        p = d(m);
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e(l + 1);
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; i--)
        {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e(i);
          h = c * p;
          r = std::hypot(p, e(i));
          e(i + 1) = s * r;
          s = e(i) / r;
          c = p / r;
          p = c * d(i) - s * g;
          d(i + 1) = h + s * (c * g + s * d(i));
          for (int k = 0; k < n; k++)
          {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e(l) / dl1;
        e(l) = s * p;
        d(l) = c * p;
      } while (std::abs(e(l)) > eps * tst1);
    }
    d(l) += f;
    e(l) = 0.0;
  }
}

void check_symmetric(const Eigen::MatrixXd &m, const char *name)
{
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  EIGENROM_VERIFY((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, InvalidInput,
                  name, " is not symmetric");
}

double relative_residual(const Eigen::VectorXd &ax, const Eigen::VectorXd &bx, double lambda)
{
  const double denom = ax.norm() + std::abs(lambda) * bx.norm();
  return denom > 0.0 ? (ax - lambda * bx).norm() / denom : 0.0;
}

std::vector<Eigenpair> subspace_iteration(const SparseMatrix &a, const SparseMatrix &b, int k,
                                          const Eigen::SimplicialLDLT<SparseMatrix> &solver,
                                          const SparseEigenOptions &options)
{
  const int n = static_cast<int>(a.rows());
  const int p = std::min(n, std::max(2 * k, k + 8));

  SplitMix64 rng(options.seed);
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; j++)
  {
    for (int i = 0; i < n; i++)
    {
      x(i, j) = rng.Uniform(-1.0, 1.0);
    }
  }

  Eigen::VectorXd theta;
  double worst = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; it++)
  {
    Eigen::MatrixXd y = solver.solve(b * x);
    EIGENROM_VERIFY(solver.info() == Eigen::Success && y.allFinite(), NumericalFailure,
                    "shift-invert solve failed");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);

    Eigen::MatrixXd ar = q.transpose() * (a * q);
    Eigen::MatrixXd br = q.transpose() * (b * q);
    ar = 0.5 * (ar + ar.transpose()).eval();
    br = 0.5 * (br + br.transpose()).eval();
    const auto ritz = solve_generalized(ar, br, p);

    Eigen::MatrixXd w(p, p);
    theta.resize(p);
    for (int j = 0; j < p; j++)
    {
      w.col(j) = ritz[j].vector;
      theta(j) = ritz[j].value;
    }
    x = q * w;

    const Eigen::MatrixXd ax = a * x.leftCols(k);
    const Eigen::MatrixXd bx = b * x.leftCols(k);
    worst = 0.0;
    for (int j = 0; j < k; j++)
    {
      worst = std::max(worst, relative_residual(ax.col(j), bx.col(j), theta(j)));
    }
    if (worst <= options.tolerance)
    {
      break;
    }
  }
  EIGENROM_VERIFY(worst <= options.accept_tolerance, NumericalFailure,
                  "subspace iteration stalled at relative residual ", worst);

  std::vector<Eigenpair> pairs(k);
  for (int j = 0; j < k; j++)
  {
    pairs[j].value = theta(j);
    pairs[j].vector = x.col(j);
    pairs[j].vector /= std::sqrt(pairs[j].vector.dot(b * pairs[j].vector));
    pairs[j].index = j;
  }
  return pairs;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd &matrix)
{
  EIGENROM_VERIFY(matrix.rows() == matrix.cols() && matrix.rows() > 0, InvalidInput,
                  "symmetric_eigen needs a non-empty square matrix");
  check_symmetric(matrix, "matrix");
  const int n = static_cast<int>(matrix.rows());
  Eigen::MatrixXd v = 0.5 * (matrix + matrix.transpose());
  Eigen::VectorXd d, e;
  if (n == 1)
  {
    return {v.diagonal(), Eigen::MatrixXd::Identity(1, 1)};
  }
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&d](int i, int j) { return d(i) < d(j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int j = 0; j < n; j++)
  {
    out.values(j) = d(order[j]);
    out.vectors.col(j) = v.col(order[j]);
  }
  return out;
}

std::vector<Eigenpair> solve_generalized(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                                         int k)
{
  const int n = static_cast<int>(a.rows());
  EIGENROM_VERIFY(a.cols() == n && b.rows() == n && b.cols() == n, InvalidInput,
                  "pencil dimensions do not match");
  EIGENROM_VERIFY(k >= 1 && k <= n, InvalidInput, "requested ", k, " eigenpairs of a size ", n,
                  " pencil");
  check_symmetric(a, "A");
  check_symmetric(b, "B");

  Eigen::LLT<Eigen::MatrixXd> llt(b);
  EIGENROM_VERIFY(llt.info() == Eigen::Success, NumericalFailure, "B not positive definite");
  const auto l = llt.matrixL();
  Eigen::MatrixXd c = l.solve(a);
  c = l.solve(c.transpose().eval());
  c = 0.5 * (c + c.transpose()).eval();

  const SymmetricEigen std_eig = symmetric_eigen(c);
  const Eigen::MatrixXd v = llt.matrixU().solve(std_eig.vectors.leftCols(k));

  std::vector<Eigenpair> pairs(k);
  for (int j = 0; j < k; j++)
  {
    pairs[j].value = std_eig.values(j);
    pairs[j].vector = v.col(j);
    pairs[j].vector /= std::sqrt(pairs[j].vector.dot(b * pairs[j].vector));
    pairs[j].index = j;
  }
  return pairs;
}

std::vector<Eigenpair> solve_generalized(const SparseMatrix &a, const SparseMatrix &b, int k,
                                         const SparseEigenOptions &options)
{
  const int n = static_cast<int>(a.rows());
  EIGENROM_VERIFY(a.cols() == n && b.rows() == n && b.cols() == n, InvalidInput,
                  "pencil dimensions do not match");
  EIGENROM_VERIFY(k >= 1 && k <= n, InvalidInput, "requested ", k, " eigenpairs of a size ", n,
                  " pencil");
  const int p = std::max(2 * k, k + 8);
  if (n <= options.dense_limit || 2 * p >= n)
  {
    return solve_generalized(Eigen::MatrixXd(a), Eigen::MatrixXd(b), k);
  }

  const double asym = SparseMatrix(a - SparseMatrix(a.transpose())).coeffs().cwiseAbs().maxCoeff();
  const double bsym = SparseMatrix(b - SparseMatrix(b.transpose())).coeffs().cwiseAbs().maxCoeff();
  EIGENROM_VERIFY(asym <= 1e-10 * a.coeffs().cwiseAbs().maxCoeff(), InvalidInput,
                  "A is not symmetric");
  EIGENROM_VERIFY(bsym <= 1e-10 * b.coeffs().cwiseAbs().maxCoeff(), InvalidInput,
                  "B is not symmetric");
  Eigen::SimplicialLLT<SparseMatrix> bcheck(b);
  EIGENROM_VERIFY(bcheck.info() == Eigen::Success, NumericalFailure, "B not positive definite");

  // Shift-invert about zero needs A positive definite; otherwise take the dense path.
  Eigen::SimplicialLDLT<SparseMatrix> solver(a);
  if (solver.info() != Eigen::Success || (solver.vectorD().array() <= 0.0).any())
  {
    return solve_generalized(Eigen::MatrixXd(a), Eigen::MatrixXd(b), k);
  }
  return subspace_iteration(a, b, k, solver, options);
}

Eigenpair fix_sign(const Eigenpair &pair)
{
  Eigenpair out = pair;
  int imax = 0;
  for (int i = 1; i < out.vector.size(); i++)
  {
    if (std::abs(out.vector(i)) > std::abs(out.vector(imax)))
    {
      imax = i;
    }
  }
  if (out.vector.size() > 0 && out.vector(imax) < 0.0)
  {
    out.vector = -out.vector;
  }
  return out;
}

Eigenpair fix_sign(const Eigenpair &pair, const Eigen::VectorXd &reference)
{
  EIGENROM_VERIFY(reference.size() == pair.vector.size(), InvalidInput,
                  "reference length mismatch");
  Eigenpair out = pair;
  if ((out.vector + reference).norm() < (out.vector - reference).norm())
  {
    out.vector = -out.vector;
  }
  return out;
}

double eigen_residual(const SparseMatrix &a, const SparseMatrix &b, const Eigenpair &pair)
{
  return (a * pair.vector - pair.value * (b * pair.vector)).norm();
}

}  // namespace eigenrom
