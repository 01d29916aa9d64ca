#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "scl/config.hpp"
#include "scl/error.hpp"
#include "scl/io.hpp"

namespace scl::fem {

/// Interface-conforming triangulation of the disk: concentric rings with
/// radius-proportional angular resolution (ring sizes double through fixed
/// transition patterns), one ring exactly on r = rz and one on r = ry.
struct TriangleMesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<int> region;                    // +1 inner phase, -1 annulus phase
  std::vector<int> boundary_vertices;         // on r = ry (Dirichlet)
  std::vector<int> interface_vertices;        // on r = rz

  double triangle_area(int t) const {
    const auto& [i, j, k] = triangles[t];
    const auto &a = vertices[i], &b = vertices[j], &c = vertices[k];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
  }

  std::array<double, 2> centroid(int t) const {
    const auto& [i, j, k] = triangles[t];
    return {(vertices[i][0] + vertices[j][0] + vertices[k][0]) / 3.0,
            (vertices[i][1] + vertices[j][1] + vertices[k][1]) / 3.0};
  }
};

inline TriangleMesh build_disk_mesh(const TwoPhaseDiskConfig& cfg, double target_edge) {
  if (!(target_edge > 0.0)) raise(errc::mesh_invalid, "edge length must be positive");
  if (target_edge > std::min(cfg.rz, cfg.ry - cfg.rz))
    raise(errc::mesh_invalid, "edge length too coarse to separate the interface from the boundary");

  const int k_plus = std::max(1, static_cast<int>(std::lround(cfg.rz / target_edge)));
  const int k_minus = std::max(1, static_cast<int>(std::lround((cfg.ry - cfg.rz) / target_edge)));

  std::vector<double> radii;
  for (int j = 1; j <= k_plus; ++j) radii.push_back(cfg.rz * j / k_plus);
  for (int j = 1; j <= k_minus; ++j) radii.push_back(cfg.rz + (cfg.ry - cfg.rz) * j / k_minus);
  const int interface_ring = k_plus - 1;  // index into `radii`

  TriangleMesh mesh;
  mesh.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start(radii.size()), ring_size(radii.size());
  int n_cur = std::max(6, static_cast<int>(std::lround(two_pi * radii[0] / target_edge)));
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (j > 0) {
      double desired = two_pi * radii[j] / target_edge;
      if (desired >= 1.5 * n_cur) n_cur *= 2;
    }
    ring_start[j] = static_cast<int>(mesh.vertices.size());
    ring_size[j] = n_cur;
    // interface and boundary rings carry exact radii by construction
    for (int i = 0; i < n_cur; ++i) {
      double th = two_pi * i / n_cur;
      mesh.vertices.push_back({radii[j] * std::cos(th), radii[j] * std::sin(th)});
    }
  }

  auto add_triangle = [&](int a, int b, int c, int reg) {
    mesh.triangles.push_back({a, b, c});
    mesh.region.push_back(reg);
  };

  // center fan
  {
    int reg = (interface_ring >= 0) ? +1 : -1;
    int n0 = ring_size[0], s0 = ring_start[0];
    for (int i = 0; i < n0; ++i) add_triangle(0, s0 + i, s0 + (i + 1) % n0, reg);
  }
  // ring bands
  for (std::size_t j = 0; j + 1 < radii.size(); ++j) {
    int reg = (static_cast<int>(j) < interface_ring) ? +1 : -1;
    int na = ring_size[j], sa = ring_start[j];
    int nb = ring_size[j + 1], sb = ring_start[j + 1];
    if (nb == na) {
      for (int i = 0; i < na; ++i) {
        int ip = (i + 1) % na;
        add_triangle(sa + i, sb + i, sb + ip, reg);
        add_triangle(sa + i, sb + ip, sa + ip, reg);
      }
    } else if (nb == 2 * na) {
      for (int i = 0; i < na; ++i) {
        int ip = (i + 1) % na;
        int o0 = 2 * i, o1 = 2 * i + 1, o2 = (2 * i + 2) % nb;
        add_triangle(sa + i, sb + o0, sb + o1, reg);
        add_triangle(sa + i, sb + o1, sa + ip, reg);
        add_triangle(sa + ip, sb + o1, sb + o2, reg);
      }
    } else {
      raise(errc::mesh_invalid, "ring transition must keep or double the resolution");
    }
  }

  {
    std::size_t last = radii.size() - 1;
    for (int i = 0; i < ring_size[last]; ++i) mesh.boundary_vertices.push_back(ring_start[last] + i);
    for (int i = 0; i < ring_size[interface_ring]; ++i)
      mesh.interface_vertices.push_back(ring_start[interface_ring] + i);
  }
  return mesh;
}

struct MeshCheck {
  bool ok = true;
  std::vector<std::string> issues;
};

/// Structural invariants: positive orientation, conformity (interior edges
/// shared by exactly two triangles, boundary edges by one), region purity,
/// and interface/boundary rings on their exact radii.
inline MeshCheck check_mesh(const TriangleMesh& mesh, const TwoPhaseDiskConfig& cfg) {
  MeshCheck out;
  auto fail = [&](const std::string& s) {
    out.ok = false;
    out.issues.push_back(s);
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (!(mesh.triangle_area(static_cast<int>(t)) > 0.0)) {
      fail("non-positive triangle area at " + std::to_string(t));
      break;
    }

  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      edge_use[{std::min(a, b), std::max(a, b)}]++;
    }
  std::vector<bool> on_boundary(mesh.vertices.size(), false);
  for (int v : mesh.boundary_vertices) on_boundary[v] = true;
  for (const auto& [edge, uses] : edge_use) {
    bool boundary_edge = on_boundary[edge.first] && on_boundary[edge.second];
    if (uses > 2 || uses < 1 || (!boundary_edge && uses == 1)) {
      fail("non-conforming edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
           ") used " + std::to_string(uses) + " times");
      break;
    }
  }

  for (int v : mesh.interface_vertices) {
    double r = std::hypot(mesh.vertices[v][0], mesh.vertices[v][1]);
    if (std::abs(r - cfg.rz) > 1e-12 * cfg.rz) {
      fail("interface vertex off the interface circle");
      break;
    }
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto c = mesh.centroid(static_cast<int>(t));
    double rc = std::hypot(c[0], c[1]);
    if ((mesh.region[t] > 0) != (rc < cfg.rz)) {
      fail("triangle straddles the interface");
      break;
    }
  }
  return out;
}

/// Plain-text export: vertex count, one vertex per line, then triangles
/// with their region tag.
inline void write_mesh(std::ostream& os, const TriangleMesh& mesh) {
  os << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
  for (const auto& v : mesh.vertices) os << format_g17(v[0]) << ' ' << format_g17(v[1]) << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    os << mesh.triangles[t][0] << ' ' << mesh.triangles[t][1] << ' ' << mesh.triangles[t][2] << ' '
       << (mesh.region[t] > 0 ? "plus" : "minus") << '\n';
}

inline void write_mesh(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream os(path);
  if (!os) raise(errc::numerical_failure, "cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

}  // namespace scl::fem
