#pragma once

#include <span>
#include <vector>

namespace stwave {

/// Uniform partition of (0,T) into slabs of equal length.
struct TimePartition {
  double total_time = 0.0;
  int n_slabs = 0;
  double dt = 0.0;
  std::vector<double> t_nodes;  // n_slabs+1 nodes, t_nodes[0]=0, back()=T

  double node(int n) const { return t_nodes[n]; }
};

TimePartition build_time_partition(double total_time, int n_slabs);

/// Interval mesh on [0,1]. Cell c spans [vertices[c], vertices[c+1]].
struct Mesh1D {
  std::vector<double> vertices;  // strictly increasing, first 0, last 1
  double h_max = 0.0;

  int n_cells() const { return static_cast<int>(vertices.size()) - 1; }
  double cell_x0(int c) const { return vertices[c]; }
  double cell_x1(int c) const { return vertices[c + 1]; }
  double cell_h(int c) const { return vertices[c + 1] - vertices[c]; }
  double cell_mid(int c) const { return 0.5 * (vertices[c] + vertices[c + 1]); }
  /// Cell containing x (clamped to [0,1]; half-open convention, x=1 maps to
  /// the last cell).
  int locate(double x) const;
  /// Vertex indices strictly inside (0,1); each is a facet shared by cells
  /// v-1 and v.
  std::vector<int> interior_vertex_ids() const;
};

/// Uniform dyadic mesh with 2^(level+1) cells, refined with extra vertices at
/// the required points (each must lie strictly inside (0,1)).
Mesh1D build_mesh_1d(int level, std::span<const double> required_points);

/// Tensor quadrilateral mesh of the unit square. Cell (cx,cy) spans
/// [xs[cx],xs[cx+1]] x [ys[cy],ys[cy+1]]; flat id = cy*nx + cx.
struct Mesh2D {
  std::vector<double> xs, ys;
  double h_max = 0.0;

  int nx() const { return static_cast<int>(xs.size()) - 1; }
  int ny() const { return static_cast<int>(ys.size()) - 1; }
  int n_cells() const { return nx() * ny(); }
  int cell_id(int cx, int cy) const { return cy * nx() + cx; }
  double cell_hx(int cx) const { return xs[cx + 1] - xs[cx]; }
  double cell_hy(int cy) const { return ys[cy + 1] - ys[cy]; }
  double cell_h(int cx, int cy) const;
  double cell_mid_x(int cx) const { return 0.5 * (xs[cx] + xs[cx + 1]); }
  double cell_mid_y(int cy) const { return 0.5 * (ys[cy] + ys[cy + 1]); }
  int locate_x(double x) const;
  int locate_y(double y) const;

  /// Axis-aligned facet. axis=0: vertical line x=xs[line], between cells
  /// (line-1,cross) and (line,cross); axis=1: horizontal line y=ys[line].
  struct Facet {
    int axis = 0;
    int line = 0;
    int cross = 0;
    bool boundary = false;
  };
  std::vector<Facet> interior_facets() const;
  std::vector<Facet> boundary_facets() const;
};

/// 2^(level+1) cells per direction; requires level >= 1 so that the lines
/// x,y in {0.25, 0.5, 0.75} are part of the grid.
Mesh2D build_mesh_2d(int level);

}  // namespace stwave
