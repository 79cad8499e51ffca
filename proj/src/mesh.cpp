// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include "eigenrom/error.hpp"

namespace eigenrom
{

namespace
{

void finalize_dofs(Mesh &mesh, const std::vector<char> &on_boundary)
{
  mesh.boundary_nodes.clear();
  mesh.vertex_of_dof.clear();
  mesh.dof_of_vertex.assign(mesh.vertices.size(), -1);
  for (int v = 0; v < mesh.num_vertices(); v++)
  {
    if (on_boundary[v])
    {
      mesh.boundary_nodes.push_back(v);
    }
    else
    {
      mesh.dof_of_vertex[v] = static_cast<int>(mesh.vertex_of_dof.size());
      mesh.vertex_of_dof.push_back(v);
    }
  }
}

}  // namespace

std::string to_string(TrianglePattern pattern)
{
  return pattern == TrianglePattern::Diagonal ? "diagonal" : "crisscross";
}

TrianglePattern triangle_pattern_from_string(const std::string &name)
{
  if (name == "diagonal")
  {
    return TrianglePattern::Diagonal;
  }
  if (name == "crisscross")
  {
    return TrianglePattern::CrissCross;
  }
  detail::Throw<InvalidInput>("unknown triangle pattern \"", name, "\"");
}

double Mesh::signed_measure(int e) const
{
  const auto &el = elements[e];
  if (dim == 1)
  {
    return vertices[el[1]].x() - vertices[el[0]].x();
  }
  const Point d1 = vertices[el[1]] - vertices[el[0]];
  const Point d2 = vertices[el[2]] - vertices[el[0]];
  return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

Eigen::VectorXd Mesh::extend(const Eigen::VectorXd &interior) const
{
  EIGENROM_VERIFY(interior.size() == num_dofs(), InvalidInput,
                  "interior vector has ", interior.size(), " entries, mesh has ", num_dofs(),
                  " dofs");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(num_vertices());
  for (int i = 0; i < num_dofs(); i++)
  {
    full(vertex_of_dof[i]) = interior(i);
  }
  return full;
}

Eigen::VectorXd Mesh::restrict(const Eigen::VectorXd &full) const
{
  EIGENROM_VERIFY(full.size() == num_vertices(), InvalidInput,
                  "vertex vector has ", full.size(), " entries, mesh has ", num_vertices(),
                  " vertices");
  Eigen::VectorXd interior(num_dofs());
  for (int i = 0; i < num_dofs(); i++)
  {
    interior(i) = full(vertex_of_dof[i]);
  }
  return interior;
}

void Mesh::validate() const
{
  EIGENROM_VERIFY(dim == 1 || dim == 2, InvalidInput, "mesh dimension must be 1 or 2");
  const int nv = num_vertices();
  for (int e = 0; e < num_elements(); e++)
  {
    for (int j = 0; j < nodes_per_element(); j++)
    {
      EIGENROM_VERIFY(elements[e][j] >= 0 && elements[e][j] < nv, InvalidInput,
                      "element ", e, " references vertex ", elements[e][j]);
    }
    EIGENROM_VERIFY(signed_measure(e) > 0.0, InvalidInput, "element ", e,
                    " has non-positive measure");
  }
  EIGENROM_VERIFY(static_cast<int>(dof_of_vertex.size()) == nv, InvalidInput,
                  "dof map size mismatch");
  EIGENROM_VERIFY(num_dofs() + static_cast<int>(boundary_nodes.size()) == nv, InvalidInput,
                  "interior and boundary counts do not add up");
  for (int i = 0; i < num_dofs(); i++)
  {
    EIGENROM_VERIFY(dof_of_vertex[vertex_of_dof[i]] == i, InvalidInput,
                    "dof map is not a bijection");
  }
}

Mesh build_interval_mesh(double a, double b, double h)
{
  EIGENROM_VERIFY(h > 0.0, InvalidInput, "mesh size must be positive, got ", h);
  EIGENROM_VERIFY(a < b, InvalidInput, "degenerate interval [", a, ", ", b, "]");
  const double cells = (b - a) / h;
  const long n = std::lround(cells);
  EIGENROM_VERIFY(n >= 1 && std::abs(cells - n) <= 0.5, InvalidInput,
                  "interval length is not compatible with h = ", h);

  Mesh mesh;
  mesh.dim = 1;
  mesh.vertices.resize(n + 1);
  for (long i = 0; i <= n; i++)
  {
    // Endpoints are exact.
    const double x = (i == n) ? b : a + (b - a) * static_cast<double>(i) / n;
    mesh.vertices[i] = Point(x, 0.0);
  }
  mesh.elements.resize(n);
  for (long i = 0; i < n; i++)
  {
    mesh.elements[i] = {static_cast<int>(i), static_cast<int>(i + 1), -1};
  }
  std::vector<char> on_boundary(n + 1, 0);
  on_boundary.front() = on_boundary.back() = 1;
  finalize_dofs(mesh, on_boundary);
  return mesh;
}

Mesh build_rect_mesh(double x0, double x1, double y0, double y1, int n,
                     TrianglePattern pattern)
{
  EIGENROM_VERIFY(n >= 2, InvalidInput, "rectangle mesh needs n >= 2, got ", n);
  EIGENROM_VERIFY(x0 < x1 && y0 < y1, InvalidInput, "degenerate rectangle");

  Mesh mesh;
  mesh.dim = 2;
  const int m = n + 1;
  auto grid = [m](int i, int j) { return j * m + i; };
  auto coord = [n](double lo, double hi, int i)
  { return (i == n) ? hi : lo + (hi - lo) * static_cast<double>(i) / n; };

  mesh.vertices.reserve(m * m + (pattern == TrianglePattern::CrissCross ? n * n : 0));
  for (int j = 0; j < m; j++)
  {
    for (int i = 0; i < m; i++)
    {
      mesh.vertices.emplace_back(coord(x0, x1, i), coord(y0, y1, j));
    }
  }
  std::vector<char> on_boundary(m * m, 0);
  for (int j = 0; j < m; j++)
  {
    for (int i = 0; i < m; i++)
    {
      on_boundary[grid(i, j)] = (i == 0 || j == 0 || i == n || j == n);
    }
  }

  for (int j = 0; j < n; j++)
  {
    for (int i = 0; i < n; i++)
    {
      const int v00 = grid(i, j), v10 = grid(i + 1, j);
      const int v01 = grid(i, j + 1), v11 = grid(i + 1, j + 1);
      if (pattern == TrianglePattern::Diagonal)
      {
        mesh.elements.push_back({v00, v10, v11});
        mesh.elements.push_back({v00, v11, v01});
      }
      else
      {
        const int c = mesh.num_vertices();
        mesh.vertices.emplace_back(0.5 * (coord(x0, x1, i) + coord(x0, x1, i + 1)),
                                   0.5 * (coord(y0, y1, j) + coord(y0, y1, j + 1)));
        on_boundary.push_back(0);
        mesh.elements.push_back({v00, v10, c});
        mesh.elements.push_back({v10, v11, c});
        mesh.elements.push_back({v11, v01, c});
        mesh.elements.push_back({v01, v00, c});
      }
    }
  }
  finalize_dofs(mesh, on_boundary);
  return mesh;
}

}  // namespace eigenrom
