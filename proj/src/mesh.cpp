#include "stwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stwave {

namespace {
constexpr double kFitTol = 1e-12;
}

TimePartition build_time_partition(double total_time, int n_slabs) {
  if (total_time <= 0.0) throw std::domain_error("time partition: T must be positive");
  if (n_slabs < 1) throw std::domain_error("time partition: need at least one slab");
  TimePartition tp;
  tp.total_time = total_time;
  tp.n_slabs = n_slabs;
  tp.dt = total_time / n_slabs;
  tp.t_nodes.resize(n_slabs + 1);
  for (int i = 0; i <= n_slabs; ++i) tp.t_nodes[i] = i * tp.dt;
  tp.t_nodes.back() = total_time;
  return tp;
}

int Mesh1D::locate(double x) const {
  auto it = std::upper_bound(vertices.begin(), vertices.end(), x);
  int c = static_cast<int>(it - vertices.begin()) - 1;
  return std::clamp(c, 0, n_cells() - 1);
}

std::vector<int> Mesh1D::interior_vertex_ids() const {
  std::vector<int> ids;
  for (int v = 1; v < static_cast<int>(vertices.size()) - 1; ++v) ids.push_back(v);
  return ids;
}

Mesh1D build_mesh_1d(int level, std::span<const double> required_points) {
  if (level < 0) throw std::domain_error("build_mesh_1d: level must be >= 0");
  for (double p : required_points) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::domain_error("build_mesh_1d: required point " +
                              std::to_string(p) + " outside (0,1)");
    }
  }
  const int n = 1 << (level + 1);
  std::vector<double> verts(n + 1);
  for (int i = 0; i <= n; ++i) verts[i] = static_cast<double>(i) / n;
  verts.front() = 0.0;
  verts.back() = 1.0;
  for (double p : required_points) verts.push_back(p);
  std::sort(verts.begin(), verts.end());
  std::vector<double> merged;
  merged.reserve(verts.size());
  for (double v : verts) {
    if (merged.empty() || v - merged.back() > kFitTol) merged.push_back(v);
  }
  Mesh1D mesh;
  mesh.vertices = std::move(merged);
  for (int c = 0; c < mesh.n_cells(); ++c) mesh.h_max = std::max(mesh.h_max, mesh.cell_h(c));
  return mesh;
}

double Mesh2D::cell_h(int cx, int cy) const {
  return std::max(cell_hx(cx), cell_hy(cy));
}

namespace {
int locate_line(const std::vector<double>& lines, double v) {
  auto it = std::upper_bound(lines.begin(), lines.end(), v);
  int c = static_cast<int>(it - lines.begin()) - 1;
  return std::clamp(c, 0, static_cast<int>(lines.size()) - 2);
}
}  // namespace

int Mesh2D::locate_x(double x) const { return locate_line(xs, x); }
int Mesh2D::locate_y(double y) const { return locate_line(ys, y); }

std::vector<Mesh2D::Facet> Mesh2D::interior_facets() const {
  std::vector<Facet> facets;
  facets.reserve((nx() - 1) * ny() + nx() * (ny() - 1));
  for (int line = 1; line < nx(); ++line) {
    for (int cy = 0; cy < ny(); ++cy) facets.push_back({0, line, cy, false});
  }
  for (int line = 1; line < ny(); ++line) {
    for (int cx = 0; cx < nx(); ++cx) facets.push_back({1, line, cx, false});
  }
  return facets;
}

std::vector<Mesh2D::Facet> Mesh2D::boundary_facets() const {
  std::vector<Facet> facets;
  facets.reserve(2 * nx() + 2 * ny());
  for (int cy = 0; cy < ny(); ++cy) {
    facets.push_back({0, 0, cy, true});
    facets.push_back({0, nx(), cy, true});
  }
  for (int cx = 0; cx < nx(); ++cx) {
    facets.push_back({1, 0, cx, true});
    facets.push_back({1, ny(), cx, true});
  }
  return facets;
}

Mesh2D build_mesh_2d(int level) {
  if (level < 1) {
    throw std::domain_error(
        "build_mesh_2d: level must be >= 1 to fit the data-domain boundary");
  }
  const int n = 1 << (level + 1);
  Mesh2D mesh;
  mesh.xs.resize(n + 1);
  for (int i = 0; i <= n; ++i) mesh.xs[i] = static_cast<double>(i) / n;
  mesh.xs.front() = 0.0;
  mesh.xs.back() = 1.0;
  mesh.ys = mesh.xs;
  mesh.h_max = 1.0 / n;
  return mesh;
}

}  // namespace stwave
