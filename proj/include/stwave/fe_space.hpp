#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "stwave/mesh.hpp"
#include "stwave/quadrature.hpp"

namespace stwave {

/// Nodal Lagrange basis on [0,1] with uniformly spaced nodes including the
/// endpoints; degree 0 uses the single node 0.5.
struct LagrangeLine {
  int degree = 1;
  std::vector<double> nodes;

  explicit LagrangeLine(int degree);
  int n_basis() const { return degree + 1; }
  /// Values (and optionally first/second derivatives) of all basis functions
  /// at x. Output spans must have length degree+1 (or be empty).
  void eval(double x, std::span<double> val, std::span<double> d1 = {},
            std::span<double> d2 = {}) const;
  /// Row p of each output holds the basis values at pts[p].
  void tabulate(std::span<const double> pts, Eigen::MatrixXd& val,
                Eigen::MatrixXd* d1 = nullptr, Eigen::MatrixXd* d2 = nullptr) const;
};

/// Basis data of one cell at a set of quadrature points.
/// val(p, i) etc. index point p, local basis i. Second derivative tables are
/// filled only when requested. In 1D the y-tables stay empty.
struct CellQuad {
  std::vector<int> dofs;           // local -> global
  std::vector<double> w;           // weights including the cell measure
  std::vector<double> x, y;        // physical coordinates
  Eigen::MatrixXd val, dx, dy, dxx, dxy, dyy;
  int n_points() const { return static_cast<int>(w.size()); }
  int n_loc() const { return static_cast<int>(dofs.size()); }
};

/// Basis data at a single point of a given cell.
struct PointBasis {
  std::vector<int> dofs;
  std::vector<double> val, dx, dy, dxx, dxy, dyy;
};

/// Continuous piecewise-polynomial space of degree k on an interval mesh.
class Space1D {
 public:
  Space1D(const Mesh1D& mesh, int degree);

  const Mesh1D& mesh() const { return *mesh_; }
  int degree() const { return k_; }
  int n_dofs() const { return n_dofs_; }
  int n_cells() const { return mesh_->n_cells(); }
  int cell_dof(int c, int j) const { return c * k_ + j; }
  int n_loc() const { return k_ + 1; }
  double dof_coord_x(int dof) const { return dof_x_[dof]; }
  double dof_coord_y(int) const { return 0.0; }
  double cell_h(int c) const { return mesh_->cell_h(c); }
  static constexpr int dim() { return 1; }

  CellQuad cell_quadrature(int c, const QuadRule& rule, int max_deriv = 1) const;
  PointBasis basis_in_cell(int c, double x, double y, int max_deriv = 1) const;
  PointBasis basis_at(double x, double y, int max_deriv = 1) const;

 private:
  const Mesh1D* mesh_;
  int k_;
  int n_dofs_;
  LagrangeLine line_;
  std::vector<double> dof_x_;
};

/// Continuous tensor-product space of degree k per direction on a
/// quadrilateral mesh. Dof (ix,iy) has flat id iy*nxd + ix.
class Space2D {
 public:
  Space2D(const Mesh2D& mesh, int degree);

  const Mesh2D& mesh() const { return *mesh_; }
  int degree() const { return k_; }
  int n_dofs() const { return nxd_ * nyd_; }
  int n_cells() const { return mesh_->n_cells(); }
  int n_loc() const { return (k_ + 1) * (k_ + 1); }
  int dof_id(int ix, int iy) const { return iy * nxd_ + ix; }
  double dof_coord_x(int dof) const { return xnodes_[dof % nxd_]; }
  double dof_coord_y(int dof) const { return ynodes_[dof / nxd_]; }
  double cell_h(int c) const;
  static constexpr int dim() { return 2; }

  CellQuad cell_quadrature(int c, const QuadRule& rule, int max_deriv = 1) const;
  PointBasis basis_in_cell(int c, double x, double y, int max_deriv = 1) const;
  PointBasis basis_at(double x, double y, int max_deriv = 1) const;

 private:
  const Mesh2D* mesh_;
  int k_;
  int nxd_, nyd_;
  LagrangeLine line_;
  std::vector<double> xnodes_, ynodes_;  // global 1d node coordinates
};

/// Coefficients of one scalar field over all time slabs. Within a slab the
/// layout is layer-major: coef[a*n_space + i] multiplies (time node a) x
/// (space dof i).
struct DiscreteField {
  int q = 1;        // time degree
  int n_space = 0;  // spatial dofs per layer
  std::vector<Eigen::VectorXd> slabs;

  int n_slabs() const { return static_cast<int>(slabs.size()); }
  static DiscreteField zero(int q, int n_space, int n_slabs);
};

enum class Deriv { value, dx, dy, dt };
enum class TraceSide { left, right };

/// Slab index and local time coordinate for evaluation at time t. At an
/// interior slab node the side picks the left or right trace.
struct SlabPoint {
  int slab;
  double tau;
};
SlabPoint locate_time(const TimePartition& tp, double t,
                      TraceSide side = TraceSide::right);

template <class Space>
double eval_field(const DiscreteField& f, const Space& space,
                  const TimePartition& tp, double t, double x, double y,
                  Deriv which = Deriv::value, TraceSide side = TraceSide::right);

/// Right minus left trace at interior time node n (1 <= n <= N-1).
template <class Space>
double trace_jump(const DiscreteField& f, const Space& space,
                  const TimePartition& tp, int n, double x, double y,
                  Deriv which = Deriv::value);

/// Nodal interpolant of fn(x,y,t) on the slab-wise tensor space.
template <class Space>
DiscreteField interpolate(const std::function<double(double, double, double)>& fn,
                          const Space& space, const TimePartition& tp, int q);

}  // namespace stwave
