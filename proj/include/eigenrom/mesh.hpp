// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_MESH_HPP
#define EIGENROM_MESH_HPP

#include <array>
#include <string>
#include <vector>
#include <Eigen/Dense>

namespace eigenrom
{

using Point = Eigen::Vector2d;

// How each grid cell of a rectangle is cut into triangles.
enum class TrianglePattern
{
  Diagonal,    // two triangles per cell, cut from lower-left to upper-right
  CrissCross   // four triangles per cell around an added cell-centre vertex
};

std::string to_string(TrianglePattern pattern);
TrianglePattern triangle_pattern_from_string(const std::string &name);

//
// Simplicial P1 mesh in one or two dimensions. One-dimensional meshes store
// coordinates in the x component and use the first two element slots.
//
struct Mesh
{
  int dim = 1;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> elements;
  std::vector<int> boundary_nodes;  // sorted
  std::vector<int> dof_of_vertex;   // -1 on the boundary
  std::vector<int> vertex_of_dof;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_dofs() const { return static_cast<int>(vertex_of_dof.size()); }
  int nodes_per_element() const { return dim + 1; }

  // Signed length (1D) or signed area (2D) of element e.
  double signed_measure(int e) const;

  // Scatter interior values to all vertices, boundary entries zero.
  Eigen::VectorXd extend(const Eigen::VectorXd &interior) const;

  // Gather interior values from a vertex vector.
  Eigen::VectorXd restrict(const Eigen::VectorXd &full) const;

  // Throws InvalidInput when any mesh invariant is broken.
  void validate() const;
};

// Uniform mesh of [a, b] with round((b - a) / h) intervals.
Mesh build_interval_mesh(double a, double b, double h);

// Uniform n x n cell triangulation of [x0, x1] x [y0, y1].
Mesh build_rect_mesh(double x0, double x1, double y0, double y1, int n,
                     TrianglePattern pattern = TrianglePattern::Diagonal);

}  // namespace eigenrom

#endif  // EIGENROM_MESH_HPP
