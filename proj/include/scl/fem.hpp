#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <fstream>
#include <vector>

#include "scl/config.hpp"
#include "scl/error.hpp"
#include "scl/io.hpp"
#include "scl/mesh.hpp"

namespace scl::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 element stiffness on a triangle (coefficient folded in by the caller):
/// K_ij = area * grad(phi_i) . grad(phi_j).
inline Eigen::Matrix3d element_stiffness(const std::array<double, 2>& p0,
                                         const std::array<double, 2>& p1,
                                         const std::array<double, 2>& p2) {
  double x0 = p0[0], y0 = p0[1], x1 = p1[0], y1 = p1[1], x2 = p2[0], y2 = p2[1];
  double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  if (!(det > 0.0)) raise(errc::mesh_invalid, "degenerate or misoriented triangle");
  double area = 0.5 * det;
  // gradients of the barycentric functions
  double b[3] = {y1 - y2, y2 - y0, y0 - y1};
  double c[3] = {x2 - x1, x0 - x2, x1 - x0};
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k(i, j) = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
  return k;
}

/// Exact P1 mass matrix: area/12 * (1 + delta_ij).
inline Eigen::Matrix3d element_mass(double area) {
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (area / 12.0) * m;
}

/// Sign-changing stiffness (indefinite) and mass (SPD) pair with the outer
/// Dirichlet ring eliminated. Only the flux convention is variational, hence
/// assembled; the unit-normal condition lives in the mode-wise solver.
struct AssembledPair {
  SparseMatrix k_matrix;
  SparseMatrix m_matrix;
  std::vector<int> free_vertices;  // dof -> mesh vertex
  std::vector<int> dof_of_vertex;  // mesh vertex -> dof or -1

  int size() const { return static_cast<int>(k_matrix.rows()); }
};

inline AssembledPair assemble(const TwoPhaseDiskConfig& cfg, const TriangleMesh& mesh) {
  if (cfg.transmission != Transmission::flux)
    raise(errc::unsupported_convention,
          "the 2-D assembly realizes the flux condition; use the mode-wise solver for unit_normal");

  AssembledPair out;
  out.dof_of_vertex.assign(mesh.vertices.size(), -1);
  std::vector<bool> dirichlet(mesh.vertices.size(), false);
  for (int v : mesh.boundary_vertices) dirichlet[v] = true;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (!dirichlet[v]) {
      out.dof_of_vertex[v] = static_cast<int>(out.free_vertices.size());
      out.free_vertices.push_back(static_cast<int>(v));
    }
  const int n = static_cast<int>(out.free_vertices.size());

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(mesh.triangles.size() * 9);
  mt.reserve(mesh.triangles.size() * 9);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    auto c = mesh.centroid(static_cast<int>(t));
    double rc = std::hypot(c[0], c[1]);
    double coeff = (mesh.region[t] > 0) ? cfg.a_plus(rc) : -cfg.a_minus(rc);
    Eigen::Matrix3d ke = coeff * element_stiffness(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                                   mesh.vertices[tri[2]]);
    Eigen::Matrix3d me = element_mass(mesh.triangle_area(static_cast<int>(t)));
    for (int i = 0; i < 3; ++i) {
      int gi = out.dof_of_vertex[tri[i]];
      if (gi < 0) continue;
      for (int j = i; j < 3; ++j) {
        int gj = out.dof_of_vertex[tri[j]];
        if (gj < 0) continue;
        // one computed value feeds both (i,j) and (j,i): symmetry is exact
        kt.emplace_back(gi, gj, ke(i, j));
        mt.emplace_back(gi, gj, me(i, j));
        if (gi != gj) {
          kt.emplace_back(gj, gi, ke(i, j));
          mt.emplace_back(gj, gi, me(i, j));
        }
      }
    }
  }
  out.k_matrix.resize(n, n);
  out.m_matrix.resize(n, n);
  out.k_matrix.setFromTriplets(kt.begin(), kt.end());
  out.m_matrix.setFromTriplets(mt.begin(), mt.end());
  out.k_matrix.makeCompressed();
  out.m_matrix.makeCompressed();
  return out;
}

/// Coordinate-format text export, sorted by (row, col).
inline void write_coo(std::ostream& os, const SparseMatrix& m) {
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << format_g17(it.value()) << '\n';
}

inline void write_coo_sorted(const std::string& path, const SparseMatrix& m) {
  SparseMatrix by_row = m.transpose();  // iterate (row, col) in order
  std::ofstream os(path);
  if (!os) raise(errc::numerical_failure, "cannot open " + path + " for writing");
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int row = 0; row < by_row.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(by_row, row); it; ++it)
      os << row << ' ' << it.row() << ' ' << format_g17(it.value()) << '\n';
}

}  // namespace scl::fem
