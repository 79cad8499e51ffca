// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/pod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include "eigenrom/eigensolve.hpp"
#include "eigenrom/error.hpp"

namespace eigenrom
{

int SnapshotSet::block_rows() const
{
  return num_blocks() > 0 ? static_cast<int>(matrix.rows()) / num_blocks() : 0;
}

void SnapshotSet::validate() const
{
  EIGENROM_VERIFY(matrix.cols() == static_cast<Eigen::Index>(parameters.size()), InvalidInput,
                  "snapshot matrix has ", matrix.cols(), " columns but ", parameters.size(),
                  " parameters");
  EIGENROM_VERIFY(num_blocks() >= 1 && matrix.rows() % num_blocks() == 0, InvalidInput,
                  "snapshot rows are not divisible into ", num_blocks(), " blocks");
  EIGENROM_VERIFY(!matrix.hasNaN(), InvalidInput, "snapshot matrix contains NaN");
}

std::vector<int> alignment_chain(const std::vector<ParameterPoint> &parameters)
{
  const int n = static_cast<int>(parameters.size());
  std::vector<int> chain;
  if (n == 0)
  {
    return chain;
  }
  const int d = static_cast<int>(parameters.front().size());
  std::vector<double> scale(d, 1.0);
  for (int i = 0; i < d; i++)
  {
    double lo = parameters[0][i], hi = parameters[0][i];
    for (const auto &p : parameters)
    {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
    if (hi > lo)
    {
      scale[i] = hi - lo;
    }
  }
  int start = 0;
  for (int j = 1; j < n; j++)
  {
    if (parameters[j] < parameters[start])
    {
      start = j;
    }
  }
  std::vector<char> used(n, 0);
  chain.push_back(start);
  used[start] = 1;
  while (static_cast<int>(chain.size()) < n)
  {
    const auto &cur = parameters[chain.back()];
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; j++)
    {
      if (used[j])
      {
        continue;
      }
      double dist = 0.0;
      for (int i = 0; i < d; i++)
      {
        const double t = (parameters[j][i] - cur[i]) / scale[i];
        dist += t * t;
      }
      if (dist < best_d)
      {
        best_d = dist;
        best = j;
      }
    }
    chain.push_back(best);
    used[best] = 1;
  }
  return chain;
}

SnapshotSet align_signs(const SnapshotSet &raw)
{
  raw.validate();
  SnapshotSet out = raw;
  const auto chain = alignment_chain(raw.parameters);
  const int rows = raw.block_rows();
  for (int b = 0; b < raw.num_blocks(); b++)
  {
    for (size_t t = 1; t < chain.size(); t++)
    {
      const auto prev = out.matrix.col(chain[t - 1]).segment(b * rows, rows);
      auto cur = out.matrix.col(chain[t]).segment(b * rows, rows);
      const double e1 = (cur - prev).norm();
      const double e2 = (cur + prev).norm();
      if (e1 >= e2)
      {
        cur = -cur;
      }
    }
  }
  return out;
}

PodBasis compute_pod(const SnapshotSet &snapshots, double epsilon)
{
  snapshots.validate();
  EIGENROM_VERIFY(snapshots.matrix.cols() >= 1, InvalidInput, "POD needs at least one snapshot");
  EIGENROM_VERIFY(epsilon > 0.0 && epsilon < 1.0, InvalidInput, "POD tolerance must lie in (0, 1)");
  const Eigen::MatrixXd &s = snapshots.matrix;

  const Eigen::MatrixXd c = s.transpose() * s;
  const SymmetricEigen eig = symmetric_eigen(c);
  const int ns = static_cast<int>(c.rows());
  const double top = eig.values(ns - 1);
  EIGENROM_VERIFY(top > 0.0, InvalidInput, "snapshot matrix is zero");

  // Descending order, rank guard applied.
  std::vector<double> sigma2;
  std::vector<int> cols;
  for (int j = ns - 1; j >= 0; j--)
  {
    if (eig.values(j) > kPodRankGuard * top)
    {
      sigma2.push_back(eig.values(j));
      cols.push_back(j);
    }
  }
  const int r = static_cast<int>(sigma2.size());
  double total = 0.0;
  for (double v : sigma2)
  {
    total += v;
  }

  PodBasis basis;
  basis.epsilon = epsilon;
  basis.singular_values.resize(r);
  for (int i = 0; i < r; i++)
  {
    basis.singular_values(i) = std::sqrt(sigma2[i]);
  }
  double acc = 0.0;
  int n = 0;
  while (n < r)
  {
    acc += sigma2[n];
    n++;
    if (acc / total >= 1.0 - epsilon)
    {
      break;
    }
  }
  basis.n = n;
  basis.energy = acc / total;

  // zeta_j = S psi_j / sigma_j, then two Gram-Schmidt passes against roundoff.
  basis.v.resize(s.rows(), n);
  for (int j = 0; j < n; j++)
  {
    basis.v.col(j) = s * eig.vectors.col(cols[j]) / basis.singular_values(j);
  }
  for (int pass = 0; pass < 2; pass++)
  {
    for (int j = 0; j < n; j++)
    {
      for (int i = 0; i < j; i++)
      {
        basis.v.col(j) -= basis.v.col(i).dot(basis.v.col(j)) * basis.v.col(i);
      }
      basis.v.col(j).normalize();
    }
  }
  return basis;
}

Eigen::MatrixXd project(const PodBasis &basis, const Eigen::MatrixXd &s)
{
  EIGENROM_VERIFY(s.rows() == basis.v.rows(), InvalidInput, "cannot project ", s.rows(),
                  "-row snapshots onto a ", basis.v.rows(), "-row basis");
  return basis.v.transpose() * s;
}

SnapshotSet stack_snapshots(const std::vector<SnapshotSet> &sets, int n_e)
{
  EIGENROM_VERIFY(n_e >= 1 && static_cast<int>(sets.size()) == n_e, InvalidInput,
                  "expected ", n_e, " snapshot sets, got ", sets.size());
  for (const auto &set : sets)
  {
    set.validate();
    EIGENROM_VERIFY(set.parameters == sets.front().parameters, InvalidInput,
                    "snapshot sets have inconsistent parameter lists");
    EIGENROM_VERIFY(set.matrix.rows() == sets.front().matrix.rows(), InvalidInput,
                    "snapshot sets have inconsistent row counts");
  }
  SnapshotSet out;
  out.parameters = sets.front().parameters;
  const Eigen::Index rows = sets.front().matrix.rows();
  out.matrix.resize(rows * n_e, sets.front().matrix.cols());
  for (int b = 0; b < n_e; b++)
  {
    const SnapshotSet aligned = align_signs(sets[b]);
    out.matrix.middleRows(b * rows, rows) = aligned.matrix;
    out.eigen_indices.insert(out.eigen_indices.end(), sets[b].eigen_indices.begin(),
                             sets[b].eigen_indices.end());
  }
  return out;
}

}  // namespace eigenrom
