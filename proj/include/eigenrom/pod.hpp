// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_POD_HPP
#define EIGENROM_POD_HPP

#include <vector>
#include <Eigen/Dense>
#include "eigenrom/sampling.hpp"

namespace eigenrom
{

//
// Snapshot columns, one per parameter. With several eigen indices the column is
// the vertical stack of one block per index, each of block_rows() entries.
//
struct SnapshotSet
{
  Eigen::MatrixXd matrix;
  std::vector<ParameterPoint> parameters;
  std::vector<int> eigen_indices;

  int num_blocks() const { return static_cast<int>(eigen_indices.size()); }
  int block_rows() const;
  void validate() const;
};

struct PodBasis
{
  Eigen::MatrixXd v;                // orthonormal columns
  Eigen::VectorXd singular_values;  // descending, all retained by the rank guard
  int n = 0;
  double epsilon = 0.0;
  double energy = 0.0;  // captured fraction I(n)
};

// Relative threshold on sigma^2 below which correlation modes are discarded.
inline constexpr double kPodRankGuard = 1e-14;

// Processing order: greedy nearest-neighbour walk from the lexicographically
// smallest parameter, distances measured after scaling each axis by its span.
std::vector<int> alignment_chain(const std::vector<ParameterPoint> &parameters);

// Per block, flip each column whose distance to its chain predecessor is not
// smaller than the distance to the negated predecessor.
SnapshotSet align_signs(const SnapshotSet &raw);

PodBasis compute_pod(const SnapshotSet &snapshots, double epsilon);

// Reduced coordinates V^T S.
Eigen::MatrixXd project(const PodBasis &basis, const Eigen::MatrixXd &s);

// Align each set, then stack blockwise in the given order.
SnapshotSet stack_snapshots(const std::vector<SnapshotSet> &sets, int n_e);

}  // namespace eigenrom

#endif  // EIGENROM_POD_HPP
