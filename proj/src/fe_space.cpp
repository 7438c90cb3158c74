#include "stwave/fe_space.hpp"

#include <cmath>
#include <stdexcept>

namespace stwave {

LagrangeLine::LagrangeLine(int deg) : degree(deg) {
  if (deg < 0) throw std::domain_error("LagrangeLine: negative degree");
  if (deg == 0) {
    nodes = {0.5};
  } else {
    nodes.resize(deg + 1);
    for (int j = 0; j <= deg; ++j) nodes[j] = static_cast<double>(j) / deg;
  }
}

void LagrangeLine::eval(double x, std::span<double> val, std::span<double> d1,
                        std::span<double> d2) const {
  const int n = n_basis();
  for (int j = 0; j < n; ++j) {
    // L_j(x) = prod_{m != j} (x - x_m)/(x_j - x_m), derivatives by product rule
    double v = 1.0;
    for (int m = 0; m < n; ++m) {
      if (m != j) v *= (x - nodes[m]) / (nodes[j] - nodes[m]);
    }
    if (!val.empty()) val[j] = v;
    if (!d1.empty()) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        double term = 1.0 / (nodes[j] - nodes[m]);
        for (int l = 0; l < n; ++l) {
          if (l != j && l != m) term *= (x - nodes[l]) / (nodes[j] - nodes[l]);
        }
        s += term;
      }
      d1[j] = s;
    }
    if (!d2.empty()) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        for (int l = 0; l < n; ++l) {
          if (l == j || l == m) continue;
          double term = 1.0 / ((nodes[j] - nodes[m]) * (nodes[j] - nodes[l]));
          for (int r = 0; r < n; ++r) {
            if (r != j && r != m && r != l) {
              term *= (x - nodes[r]) / (nodes[j] - nodes[r]);
            }
          }
          s += term;
        }
      }
      d2[j] = s;
    }
  }
}

void LagrangeLine::tabulate(std::span<const double> pts, Eigen::MatrixXd& val,
                            Eigen::MatrixXd* d1, Eigen::MatrixXd* d2) const {
  const int np = static_cast<int>(pts.size());
  const int n = n_basis();
  val.resize(np, n);
  if (d1) d1->resize(np, n);
  if (d2) d2->resize(np, n);
  std::vector<double> v(n), g(n), h(n);
  for (int p = 0; p < np; ++p) {
    eval(pts[p], v, d1 ? std::span<double>(g) : std::span<double>(),
         d2 ? std::span<double>(h) : std::span<double>());
    for (int j = 0; j < n; ++j) {
      val(p, j) = v[j];
      if (d1) (*d1)(p, j) = g[j];
      if (d2) (*d2)(p, j) = h[j];
    }
  }
}

Space1D::Space1D(const Mesh1D& mesh, int degree)
    : mesh_(&mesh), k_(degree), line_(degree) {
  if (degree < 1) throw std::domain_error("Space1D: degree must be >= 1");
  n_dofs_ = mesh.n_cells() * k_ + 1;
  dof_x_.resize(n_dofs_);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int j = 0; j <= k_; ++j) {
      dof_x_[cell_dof(c, j)] = mesh.cell_x0(c) + line_.nodes[j] * mesh.cell_h(c);
    }
  }
  dof_x_.back() = 1.0;
}

CellQuad Space1D::cell_quadrature(int c, const QuadRule& rule, int max_deriv) const {
  CellQuad cq;
  const int np = rule.size();
  const double x0 = mesh_->cell_x0(c);
  const double len = mesh_->cell_h(c);
  cq.dofs.resize(k_ + 1);
  for (int j = 0; j <= k_; ++j) cq.dofs[j] = cell_dof(c, j);
  cq.w.resize(np);
  cq.x.resize(np);
  for (int p = 0; p < np; ++p) {
    cq.w[p] = rule.weights[p] * len;
    cq.x[p] = x0 + rule.points[p] * len;
  }
  Eigen::MatrixXd d1, d2;
  line_.tabulate(rule.points, cq.val, max_deriv >= 1 ? &d1 : nullptr,
                 max_deriv >= 2 ? &d2 : nullptr);
  if (max_deriv >= 1) cq.dx = d1 / len;
  if (max_deriv >= 2) cq.dxx = d2 / (len * len);
  return cq;
}

PointBasis Space1D::basis_in_cell(int c, double x, double, int max_deriv) const {
  PointBasis pb;
  const double len = mesh_->cell_h(c);
  const double xi = (x - mesh_->cell_x0(c)) / len;
  pb.dofs.resize(k_ + 1);
  for (int j = 0; j <= k_; ++j) pb.dofs[j] = cell_dof(c, j);
  pb.val.resize(k_ + 1);
  if (max_deriv >= 1) pb.dx.resize(k_ + 1);
  if (max_deriv >= 2) pb.dxx.resize(k_ + 1);
  line_.eval(xi, pb.val, pb.dx, pb.dxx);
  for (double& g : pb.dx) g /= len;
  for (double& g : pb.dxx) g /= len * len;
  return pb;
}

PointBasis Space1D::basis_at(double x, double y, int max_deriv) const {
  return basis_in_cell(mesh_->locate(x), x, y, max_deriv);
}

Space2D::Space2D(const Mesh2D& mesh, int degree)
    : mesh_(&mesh), k_(degree), line_(degree) {
  if (degree < 1) throw std::domain_error("Space2D: degree must be >= 1");
  nxd_ = mesh.nx() * k_ + 1;
  nyd_ = mesh.ny() * k_ + 1;
  xnodes_.resize(nxd_);
  ynodes_.resize(nyd_);
  for (int cx = 0; cx < mesh.nx(); ++cx) {
    for (int j = 0; j <= k_; ++j) {
      xnodes_[cx * k_ + j] = mesh.xs[cx] + line_.nodes[j] * mesh.cell_hx(cx);
    }
  }
  xnodes_.back() = 1.0;
  for (int cy = 0; cy < mesh.ny(); ++cy) {
    for (int j = 0; j <= k_; ++j) {
      ynodes_[cy * k_ + j] = mesh.ys[cy] + line_.nodes[j] * mesh.cell_hy(cy);
    }
  }
  ynodes_.back() = 1.0;
}

double Space2D::cell_h(int c) const {
  return mesh_->cell_h(c % mesh_->nx(), c / mesh_->nx());
}

CellQuad Space2D::cell_quadrature(int c, const QuadRule& rule, int max_deriv) const {
  CellQuad cq;
  const int cx = c % mesh_->nx();
  const int cy = c / mesh_->nx();
  const double lx = mesh_->cell_hx(cx);
  const double ly = mesh_->cell_hy(cy);
  const int np = rule.size();
  const int nb = k_ + 1;

  Eigen::MatrixXd vx, dx1, dx2, vy, dy1, dy2;
  line_.tabulate(rule.points, vx, max_deriv >= 1 ? &dx1 : nullptr,
                 max_deriv >= 2 ? &dx2 : nullptr);
  vy = vx;
  if (max_deriv >= 1) dy1 = dx1;
  if (max_deriv >= 2) dy2 = dx2;

  cq.dofs.resize(nb * nb);
  for (int jy = 0; jy < nb; ++jy) {
    for (int jx = 0; jx < nb; ++jx) {
      cq.dofs[jy * nb + jx] = dof_id(cx * k_ + jx, cy * k_ + jy);
    }
  }
  cq.w.resize(np * np);
  cq.x.resize(np * np);
  cq.y.resize(np * np);
  cq.val.resize(np * np, nb * nb);
  if (max_deriv >= 1) {
    cq.dx.resize(np * np, nb * nb);
    cq.dy.resize(np * np, nb * nb);
  }
  if (max_deriv >= 2) {
    cq.dxx.resize(np * np, nb * nb);
    cq.dxy.resize(np * np, nb * nb);
    cq.dyy.resize(np * np, nb * nb);
  }
  for (int py = 0; py < np; ++py) {
    for (int px = 0; px < np; ++px) {
      const int p = py * np + px;
      cq.w[p] = rule.weights[px] * rule.weights[py] * lx * ly;
      cq.x[p] = mesh_->xs[cx] + rule.points[px] * lx;
      cq.y[p] = mesh_->ys[cy] + rule.points[py] * ly;
      for (int jy = 0; jy < nb; ++jy) {
        for (int jx = 0; jx < nb; ++jx) {
          const int j = jy * nb + jx;
          cq.val(p, j) = vx(px, jx) * vy(py, jy);
          if (max_deriv >= 1) {
            cq.dx(p, j) = dx1(px, jx) / lx * vy(py, jy);
            cq.dy(p, j) = vx(px, jx) * dy1(py, jy) / ly;
          }
          if (max_deriv >= 2) {
            cq.dxx(p, j) = dx2(px, jx) / (lx * lx) * vy(py, jy);
            cq.dxy(p, j) = dx1(px, jx) / lx * dy1(py, jy) / ly;
            cq.dyy(p, j) = vx(px, jx) * dy2(py, jy) / (ly * ly);
          }
        }
      }
    }
  }
  return cq;
}

PointBasis Space2D::basis_in_cell(int c, double x, double y, int max_deriv) const {
  PointBasis pb;
  const int cx = c % mesh_->nx();
  const int cy = c / mesh_->nx();
  const double lx = mesh_->cell_hx(cx);
  const double ly = mesh_->cell_hy(cy);
  const double xi = (x - mesh_->xs[cx]) / lx;
  const double eta = (y - mesh_->ys[cy]) / ly;
  const int nb = k_ + 1;
  std::vector<double> vx(nb), gx(nb), hx(nb), vy(nb), gy(nb), hy(nb);
  line_.eval(xi, vx, max_deriv >= 1 ? std::span<double>(gx) : std::span<double>(),
             max_deriv >= 2 ? std::span<double>(hx) : std::span<double>());
  line_.eval(eta, vy, max_deriv >= 1 ? std::span<double>(gy) : std::span<double>(),
             max_deriv >= 2 ? std::span<double>(hy) : std::span<double>());
  pb.dofs.resize(nb * nb);
  pb.val.resize(nb * nb);
  if (max_deriv >= 1) {
    pb.dx.resize(nb * nb);
    pb.dy.resize(nb * nb);
  }
  if (max_deriv >= 2) {
    pb.dxx.resize(nb * nb);
    pb.dxy.resize(nb * nb);
    pb.dyy.resize(nb * nb);
  }
  for (int jy = 0; jy < nb; ++jy) {
    for (int jx = 0; jx < nb; ++jx) {
      const int j = jy * nb + jx;
      pb.dofs[j] = dof_id(cx * k_ + jx, cy * k_ + jy);
      pb.val[j] = vx[jx] * vy[jy];
      if (max_deriv >= 1) {
        pb.dx[j] = gx[jx] / lx * vy[jy];
        pb.dy[j] = vx[jx] * gy[jy] / ly;
      }
      if (max_deriv >= 2) {
        pb.dxx[j] = hx[jx] / (lx * lx) * vy[jy];
        pb.dxy[j] = gx[jx] / lx * gy[jy] / ly;
        pb.dyy[j] = vx[jx] * hy[jy] / (ly * ly);
      }
    }
  }
  return pb;
}

PointBasis Space2D::basis_at(double x, double y, int max_deriv) const {
  const int c = mesh_->cell_id(mesh_->locate_x(x), mesh_->locate_y(y));
  return basis_in_cell(c, x, y, max_deriv);
}

DiscreteField DiscreteField::zero(int q, int n_space, int n_slabs) {
  DiscreteField f;
  f.q = q;
  f.n_space = n_space;
  f.slabs.assign(n_slabs, Eigen::VectorXd::Zero((q + 1) * n_space));
  return f;
}

SlabPoint locate_time(const TimePartition& tp, double t, TraceSide side) {
  const double tol = 1e-12 * std::max(1.0, tp.total_time);
  if (t < -tol || t > tp.total_time + tol) {
    throw std::domain_error("field evaluation: time outside [0,T]");
  }
  int slab = static_cast<int>(std::floor(t / tp.dt));
  slab = std::clamp(slab, 0, tp.n_slabs - 1);
  // snap to a node when within tolerance, honoring the requested side
  for (int n : {slab, slab + 1}) {
    if (std::abs(t - tp.node(n)) <= tol) {
      if (side == TraceSide::right) {
        int s = std::min(n, tp.n_slabs - 1);
        return {s, n == tp.n_slabs ? 1.0 : 0.0};
      }
      int s = std::max(n - 1, 0);
      return {s, n == 0 ? 0.0 : 1.0};
    }
  }
  return {slab, (t - tp.node(slab)) / tp.dt};
}

namespace {
// time basis values or derivative at tau, scaled to physical time
void time_basis(int q, double tau, double dt, bool derivative,
                std::vector<double>& out) {
  LagrangeLine line(q);
  out.assign(q + 1, 0.0);
  std::vector<double> d1(q + 1);
  if (derivative) {
    line.eval(tau, {}, d1);
    for (int a = 0; a <= q; ++a) out[a] = d1[a] / dt;
  } else {
    line.eval(tau, out);
  }
}
}  // namespace

template <class Space>
double eval_field(const DiscreteField& f, const Space& space,
                  const TimePartition& tp, double t, double x, double y,
                  Deriv which, TraceSide side) {
  const SlabPoint sp = locate_time(tp, t, side);
  std::vector<double> psi;
  time_basis(f.q, sp.tau, tp.dt, which == Deriv::dt, psi);
  const int need = (which == Deriv::dx || which == Deriv::dy) ? 1 : 0;
  const PointBasis pb = space.basis_at(x, y, need);
  const std::vector<double>& phi = which == Deriv::dx   ? pb.dx
                                   : which == Deriv::dy ? pb.dy
                                                        : pb.val;
  const Eigen::VectorXd& coef = f.slabs[sp.slab];
  double out = 0.0;
  for (int a = 0; a <= f.q; ++a) {
    if (psi[a] == 0.0) continue;
    double s = 0.0;
    for (size_t j = 0; j < pb.dofs.size(); ++j) {
      s += coef[a * f.n_space + pb.dofs[j]] * phi[j];
    }
    out += psi[a] * s;
  }
  return out;
}

template <class Space>
double trace_jump(const DiscreteField& f, const Space& space,
                  const TimePartition& tp, int n, double x, double y,
                  Deriv which) {
  if (n < 1 || n > tp.n_slabs - 1) {
    throw std::domain_error("trace_jump: node index must be interior");
  }
  const double t = tp.node(n);
  return eval_field(f, space, tp, t, x, y, which, TraceSide::right) -
         eval_field(f, space, tp, t, x, y, which, TraceSide::left);
}

template <class Space>
DiscreteField interpolate(const std::function<double(double, double, double)>& fn,
                          const Space& space, const TimePartition& tp, int q) {
  DiscreteField f = DiscreteField::zero(q, space.n_dofs(), tp.n_slabs);
  LagrangeLine tline(q);
  for (int n = 0; n < tp.n_slabs; ++n) {
    for (int a = 0; a <= q; ++a) {
      const double t = tp.node(n) + tline.nodes[a] * tp.dt;
      for (int i = 0; i < space.n_dofs(); ++i) {
        f.slabs[n][a * space.n_dofs() + i] =
            fn(space.dof_coord_x(i), space.dof_coord_y(i), t);
      }
    }
  }
  return f;
}

template double eval_field<Space1D>(const DiscreteField&, const Space1D&,
                                    const TimePartition&, double, double, double,
                                    Deriv, TraceSide);
template double eval_field<Space2D>(const DiscreteField&, const Space2D&,
                                    const TimePartition&, double, double, double,
                                    Deriv, TraceSide);
template double trace_jump<Space1D>(const DiscreteField&, const Space1D&,
                                    const TimePartition&, int, double, double, Deriv);
template double trace_jump<Space2D>(const DiscreteField&, const Space2D&,
                                    const TimePartition&, int, double, double, Deriv);
template DiscreteField interpolate<Space1D>(
    const std::function<double(double, double, double)>&, const Space1D&,
    const TimePartition&, int);
template DiscreteField interpolate<Space2D>(
    const std::function<double(double, double, double)>&, const Space2D&,
    const TimePartition&, int);

}  // namespace stwave
