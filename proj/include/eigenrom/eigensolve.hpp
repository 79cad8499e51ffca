// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_EIGENSOLVE_HPP
#define EIGENROM_EIGENSOLVE_HPP

#include <cstdint>
#include <vector>
#include <Eigen/Dense>
#include "eigenrom/fem.hpp"

namespace eigenrom
{

//
// One generalized eigenpair with u^T B u = 1. index is the 0-based position in
// the ascending spectrum.
//
struct Eigenpair
{
  double value = 0.0;
  Eigen::VectorXd vector;
  int index = 0;
};

// Full spectrum of a symmetric matrix, ascending, orthonormal eigenvectors.
struct SymmetricEigen
{
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Householder tridiagonalization followed by implicit-shift QL.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd &matrix);

// The k smallest eigenpairs of A u = lambda B u by Cholesky reduction of B.
std::vector<Eigenpair> solve_generalized(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                                         int k);

struct SparseEigenOptions
{
  // Pencils up to this size go through the dense path.
  int dense_limit = 256;
  // Stop when every wanted pair has relative residual below this.
  double tolerance = 1e-12;
  // Pairs with residual below this are still accepted at max_iterations.
  double accept_tolerance = 1e-9;
  int max_iterations = 1000;
  std::uint64_t seed = 0x5EED;
};

//
// Sparse entry point. Small pencils are densified; larger ones use block subspace
// iteration on (A - sigma B)^{-1} B with Rayleigh-Ritz on the dense path.
//
std::vector<Eigenpair> solve_generalized(const SparseMatrix &a, const SparseMatrix &b, int k,
                                         const SparseEigenOptions &options = {});

// Largest-magnitude component made positive; ties go to the lowest index.
Eigenpair fix_sign(const Eigenpair &pair);

// Sign chosen to minimize ||u - reference||_2.
Eigenpair fix_sign(const Eigenpair &pair, const Eigen::VectorXd &reference);

// ||A u - lambda B u||_2.
double eigen_residual(const SparseMatrix &a, const SparseMatrix &b, const Eigenpair &pair);

}  // namespace eigenrom

#endif  // EIGENROM_EIGENSOLVE_HPP
