#include "stwave/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stwave {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kFitTol = 1e-10;

// [test][trial] integral over one slab of (d/dt)^dtrial psi_trial *
// (d/dt)^dtest psi_test, i.e. dt^(1 - dtrial - dtest) times the reference
// integral.
Eigen::MatrixXd time_form(const LagrangeLine& trial, const LagrangeLine& test,
                          int dtrial, int dtest, double dt) {
  const QuadRule rule = gauss_rule(std::max(trial.degree, test.degree) + 2);
  Eigen::MatrixXd va, da, vb, db;
  trial.tabulate(rule.points, va, &da);
  test.tabulate(rule.points, vb, &db);
  const Eigen::MatrixXd& ta = dtrial ? da : va;
  const Eigen::MatrixXd& tb = dtest ? db : vb;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(test.n_basis(), trial.n_basis());
  for (int p = 0; p < rule.size(); ++p) {
    for (int b = 0; b < test.n_basis(); ++b) {
      for (int a = 0; a < trial.n_basis(); ++a) {
        out(b, a) += rule.weights[p] * ta(p, a) * tb(p, b);
      }
    }
  }
  return out * std::pow(dt, 1 - dtrial - dtest);
}

// scale * kron(tmat, smat) added at the given field offsets; row index
// offset_row + b*nsp_row + j, column offset_col + a*nsp_col + i.
void add_kron(std::vector<Triplet>& out, const Eigen::MatrixXd& tmat,
              const SpMat& smat, int offset_row, int offset_col, int nsp_row,
              int nsp_col, double scale = 1.0) {
  if (scale == 0.0) return;
  for (int b = 0; b < tmat.rows(); ++b) {
    for (int a = 0; a < tmat.cols(); ++a) {
      const double tv = scale * tmat(b, a);
      if (tv == 0.0) continue;
      for (int col = 0; col < smat.outerSize(); ++col) {
        for (SpMat::InnerIterator it(smat, col); it; ++it) {
          out.emplace_back(offset_row + b * nsp_row + it.row(),
                           offset_col + a * nsp_col + it.col(), tv * it.value());
        }
      }
    }
  }
}

SpMat from_triplets(int rows, int cols, std::vector<Triplet>& trip) {
  SpMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

// ---- spatial forms ------------------------------------------------------

struct LocalAdder {
  std::vector<Triplet>& out;
  void add(const std::vector<int>& rdofs, const std::vector<int>& cdofs,
           const Eigen::MatrixXd& local) {
    for (size_t r = 0; r < rdofs.size(); ++r) {
      for (size_t c = 0; c < cdofs.size(); ++c) {
        if (local(r, c) != 0.0) out.emplace_back(rdofs[r], cdofs[c], local(r, c));
      }
    }
  }
};

// weighted product of two basis tables: sum_p w_p * A(p,r) * B(p,c)
Eigen::MatrixXd wprod(const std::vector<double>& w, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.cols(), b.cols());
  for (int p = 0; p < static_cast<int>(w.size()); ++p) {
    out += w[p] * a.row(p).transpose() * b.row(p);
  }
  return out;
}

// volume matrices of a single space: mass, c^2 stiffness, c^4 stiffness
template <class Space>
void volume_forms(const Space& space, std::span<const double> csq, SpMat* mass,
                  SpMat* stiff_c2, SpMat* stiff_c4) {
  const QuadRule rule = gauss_rule(volume_rule_points(space.degree()));
  std::vector<Triplet> tm, t2, t4;
  for (int c = 0; c < space.n_cells(); ++c) {
    const CellQuad cq = space.cell_quadrature(c, rule, 1);
    const double c2 = csq[c];
    if (mass) {
      LocalAdder{tm}.add(cq.dofs, cq.dofs, wprod(cq.w, cq.val, cq.val));
    }
    if (stiff_c2 || stiff_c4) {
      Eigen::MatrixXd k = wprod(cq.w, cq.dx, cq.dx);
      if (Space::dim() == 2) k += wprod(cq.w, cq.dy, cq.dy);
      if (stiff_c2) LocalAdder{t2}.add(cq.dofs, cq.dofs, (c2 * k).eval());
      if (stiff_c4) LocalAdder{t4}.add(cq.dofs, cq.dofs, (c2 * c2 * k).eval());
    }
  }
  const int n = space.n_dofs();
  if (mass) *mass = from_triplets(n, n, tm);
  if (stiff_c2) *stiff_c2 = from_triplets(n, n, t2);
  if (stiff_c4) *stiff_c4 = from_triplets(n, n, t4);
}

// mass restricted to the given cells
template <class Space>
SpMat mass_on_cells(const Space& space, const std::vector<int>& cells) {
  const QuadRule rule = gauss_rule(volume_rule_points(space.degree()));
  std::vector<Triplet> trip;
  for (int c : cells) {
    const CellQuad cq = space.cell_quadrature(c, rule, 0);
    LocalAdder{trip}.add(cq.dofs, cq.dofs, wprod(cq.w, cq.val, cq.val));
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trip);
}

// cross mass and c^2 stiffness between two spaces on the same mesh
template <class Space>
void cross_volume_forms(const Space& trial, const Space& test,
                        std::span<const double> csq, SpMat* mass, SpMat* stiff_c2) {
  const QuadRule rule =
      gauss_rule(volume_rule_points(std::max(trial.degree(), test.degree())));
  std::vector<Triplet> tm, t2;
  for (int c = 0; c < trial.n_cells(); ++c) {
    const CellQuad ca = trial.cell_quadrature(c, rule, 1);
    const CellQuad cb = test.cell_quadrature(c, rule, 1);
    if (mass) LocalAdder{tm}.add(cb.dofs, ca.dofs, wprod(ca.w, cb.val, ca.val));
    if (stiff_c2) {
      Eigen::MatrixXd k = wprod(ca.w, cb.dx, ca.dx);
      if (Space::dim() == 2) k += wprod(ca.w, cb.dy, ca.dy);
      LocalAdder{t2}.add(cb.dofs, ca.dofs, (csq[c] * k).eval());
    }
  }
  if (mass) *mass = from_triplets(test.n_dofs(), trial.n_dofs(), tm);
  if (stiff_c2) *stiff_c2 = from_triplets(test.n_dofs(), trial.n_dofs(), t2);
}

// least-squares forms: h^2 (phi, phi), h^2 (c^2 lap phi, phi),
// h^2 (c^2 lap phi, c^2 lap phi)
template <class Space>
void gls_forms(const Space& space, std::span<const double> csq, SpMat* mm,
               SpMat* ml, SpMat* ll) {
  const QuadRule rule = gauss_rule(volume_rule_points(space.degree()));
  std::vector<Triplet> tmm, tml, tll;
  for (int c = 0; c < space.n_cells(); ++c) {
    const CellQuad cq = space.cell_quadrature(c, rule, 2);
    const double h2 = space.cell_h(c) * space.cell_h(c);
    const double c2 = csq[c];
    Eigen::MatrixXd lap = cq.dxx;
    if (Space::dim() == 2) lap += cq.dyy;
    if (mm) LocalAdder{tmm}.add(cq.dofs, cq.dofs, (h2 * wprod(cq.w, cq.val, cq.val)).eval());
    // rows: value of the test basis; cols: c^2-weighted laplacian of the trial
    if (ml) LocalAdder{tml}.add(cq.dofs, cq.dofs, (h2 * c2 * wprod(cq.w, cq.val, lap)).eval());
    if (ll) LocalAdder{tll}.add(cq.dofs, cq.dofs, (h2 * c2 * c2 * wprod(cq.w, lap, lap)).eval());
  }
  const int n = space.n_dofs();
  if (mm) *mm = from_triplets(n, n, tmm);
  if (ml) *ml = from_triplets(n, n, tml);
  if (ll) *ll = from_triplets(n, n, tll);
}

// ---- facet forms, 1D ------------------------------------------------------

// interior-penalty form: sum over interior vertices of
// h_F * jump(c^2 phi') * jump(c^2 phi')
SpMat cip_form(const Space1D& space, std::span<const double> csq) {
  const Mesh1D& mesh = space.mesh();
  std::vector<Triplet> trip;
  for (int v : mesh.interior_vertex_ids()) {
    const int cl = v - 1, cr = v;
    const double x = mesh.vertices[v];
    const double hf = 0.5 * (mesh.cell_h(cl) + mesh.cell_h(cr));
    const PointBasis left = space.basis_in_cell(cl, x, 0.0, 1);
    const PointBasis right = space.basis_in_cell(cr, x, 0.0, 1);
    std::vector<int> dofs;
    std::vector<double> jump;
    for (size_t j = 0; j < left.dofs.size(); ++j) {
      dofs.push_back(left.dofs[j]);
      jump.push_back(-csq[cl] * left.dx[j]);
    }
    for (size_t j = 0; j < right.dofs.size(); ++j) {
      // the shared vertex dof appears in both cells
      auto it = std::find(dofs.begin(), dofs.end(), right.dofs[j]);
      if (it != dofs.end()) {
        jump[it - dofs.begin()] += csq[cr] * right.dx[j];
      } else {
        dofs.push_back(right.dofs[j]);
        jump.push_back(csq[cr] * right.dx[j]);
      }
    }
    for (size_t r = 0; r < dofs.size(); ++r) {
      for (size_t c = 0; c < dofs.size(); ++c) {
        const double v2 = hf * jump[r] * jump[c];
        if (v2 != 0.0) trip.emplace_back(dofs[r], dofs[c], v2);
      }
    }
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trip);
}

// boundary penalty sum_F h_F^{-1} (phi, phi)_F; in 1D the facet integral is a
// point product at x in {0,1}
SpMat boundary_penalty(const Space1D& space, std::span<const double>) {
  const Mesh1D& mesh = space.mesh();
  std::vector<Triplet> trip;
  for (int side = 0; side < 2; ++side) {
    const int c = side == 0 ? 0 : mesh.n_cells() - 1;
    const double x = side == 0 ? 0.0 : 1.0;
    const double w = 1.0 / mesh.cell_h(c);
    const PointBasis pb = space.basis_in_cell(c, x, 0.0, 0);
    for (size_t r = 0; r < pb.dofs.size(); ++r) {
      for (size_t cc = 0; cc < pb.dofs.size(); ++cc) {
        const double v = w * pb.val[r] * pb.val[cc];
        if (v != 0.0) trip.emplace_back(pb.dofs[r], pb.dofs[cc], v);
      }
    }
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trip);
}

// outward flux against the test trace: (c^2 phi_trial' n, phi_test)_boundary
SpMat boundary_flux(const Space1D& trial, const Space1D& test,
                    std::span<const double> csq) {
  const Mesh1D& mesh = trial.mesh();
  std::vector<Triplet> trip;
  for (int side = 0; side < 2; ++side) {
    const int c = side == 0 ? 0 : mesh.n_cells() - 1;
    const double x = side == 0 ? 0.0 : 1.0;
    const double nrm = side == 0 ? -1.0 : 1.0;
    const PointBasis pa = trial.basis_in_cell(c, x, 0.0, 1);
    const PointBasis pb = test.basis_in_cell(c, x, 0.0, 0);
    for (size_t r = 0; r < pb.dofs.size(); ++r) {
      for (size_t a = 0; a < pa.dofs.size(); ++a) {
        const double v = csq[c] * pa.dx[a] * nrm * pb.val[r];
        if (v != 0.0) trip.emplace_back(pb.dofs[r], pa.dofs[a], v);
      }
    }
  }
  return from_triplets(test.n_dofs(), trial.n_dofs(), trip);
}

// ---- facet forms, 2D ------------------------------------------------------

// basis trace data of one cell restricted to a facet, tabulated at edge points
struct EdgeTrace {
  std::vector<int> dofs;
  Eigen::MatrixXd val;     // [pt][loc]
  Eigen::MatrixXd dnormal; // derivative in the facet-normal direction
};

EdgeTrace edge_trace(const Space2D& space, int cx, int cy, const Mesh2D::Facet& f,
                     const QuadRule& rule, bool need_normal) {
  const Mesh2D& mesh = space.mesh();
  EdgeTrace tr;
  const int np = rule.size();
  const int nb = space.degree() + 1;
  LagrangeLine line(space.degree());
  Eigen::MatrixXd tv, td;  // tangential tables at edge points
  line.tabulate(rule.points, tv, nullptr);
  std::vector<double> nv(nb), nd(nb);
  // normal coordinate of the facet within this cell (0 or 1 side)
  if (f.axis == 0) {
    const double xi = f.line == cx ? 0.0 : 1.0;
    line.eval(xi, nv, nd);
    const double lx = mesh.cell_hx(cx);
    tr.dofs.resize(nb * nb);
    tr.val.resize(np, nb * nb);
    if (need_normal) tr.dnormal.resize(np, nb * nb);
    for (int jy = 0; jy < nb; ++jy) {
      for (int jx = 0; jx < nb; ++jx) {
        const int j = jy * nb + jx;
        tr.dofs[j] = space.dof_id(cx * space.degree() + jx, cy * space.degree() + jy);
        for (int p = 0; p < np; ++p) {
          tr.val(p, j) = nv[jx] * tv(p, jy);
          if (need_normal) tr.dnormal(p, j) = nd[jx] / lx * tv(p, jy);
        }
      }
    }
  } else {
    const double eta = f.line == cy ? 0.0 : 1.0;
    line.eval(eta, nv, nd);
    const double ly = mesh.cell_hy(cy);
    tr.dofs.resize(nb * nb);
    tr.val.resize(np, nb * nb);
    if (need_normal) tr.dnormal.resize(np, nb * nb);
    for (int jy = 0; jy < nb; ++jy) {
      for (int jx = 0; jx < nb; ++jx) {
        const int j = jy * nb + jx;
        tr.dofs[j] = space.dof_id(cx * space.degree() + jx, cy * space.degree() + jy);
        for (int p = 0; p < np; ++p) {
          tr.val(p, j) = tv(p, jx) * nv[jy];
          if (need_normal) tr.dnormal(p, j) = tv(p, jx) * nd[jy] / ly;
        }
      }
    }
  }
  return tr;
}

double facet_length(const Mesh2D& mesh, const Mesh2D::Facet& f) {
  return f.axis == 0 ? mesh.cell_hy(f.cross) : mesh.cell_hx(f.cross);
}

SpMat cip_form(const Space2D& space, std::span<const double> csq) {
  const Mesh2D& mesh = space.mesh();
  const QuadRule rule = gauss_rule(volume_rule_points(space.degree()));
  std::vector<Triplet> trip;
  for (const auto& f : mesh.interior_facets()) {
    int cxm, cym, cxp, cyp;
    if (f.axis == 0) {
      cxm = f.line - 1; cym = f.cross; cxp = f.line; cyp = f.cross;
    } else {
      cxm = f.cross; cym = f.line - 1; cxp = f.cross; cyp = f.line;
    }
    const int cm = mesh.cell_id(cxm, cym);
    const int cp = mesh.cell_id(cxp, cyp);
    const double hf = 0.5 * (mesh.cell_h(cxm, cym) + mesh.cell_h(cxp, cyp));
    const double len = facet_length(mesh, f);
    const EdgeTrace tm = edge_trace(space, cxm, cym, f, rule, true);
    const EdgeTrace tp = edge_trace(space, cxp, cyp, f, rule, true);
    // union dof list; minus side first
    std::vector<int> dofs = tm.dofs;
    std::vector<int> map_p(tp.dofs.size());
    for (size_t j = 0; j < tp.dofs.size(); ++j) {
      auto it = std::find(dofs.begin(), dofs.end(), tp.dofs[j]);
      if (it == dofs.end()) {
        dofs.push_back(tp.dofs[j]);
        map_p[j] = static_cast<int>(dofs.size()) - 1;
      } else {
        map_p[j] = static_cast<int>(it - dofs.begin());
      }
    }
    const int nu = static_cast<int>(dofs.size());
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(rule.size(), nu);
    for (int p = 0; p < rule.size(); ++p) {
      for (size_t j = 0; j < tm.dofs.size(); ++j) {
        jump(p, j) -= csq[cm] * tm.dnormal(p, j);
      }
      for (size_t j = 0; j < tp.dofs.size(); ++j) {
        jump(p, map_p[j]) += csq[cp] * tp.dnormal(p, j);
      }
    }
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nu, nu);
    for (int p = 0; p < rule.size(); ++p) {
      local += (hf * rule.weights[p] * len) * jump.row(p).transpose() * jump.row(p);
    }
    for (int r = 0; r < nu; ++r) {
      for (int c = 0; c < nu; ++c) {
        if (local(r, c) != 0.0) trip.emplace_back(dofs[r], dofs[c], local(r, c));
      }
    }
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trip);
}

SpMat boundary_penalty(const Space2D& space, std::span<const double>) {
  const Mesh2D& mesh = space.mesh();
  const QuadRule rule = gauss_rule(volume_rule_points(space.degree()));
  std::vector<Triplet> trip;
  for (const auto& f : mesh.boundary_facets()) {
    const int cx = f.axis == 0 ? (f.line == 0 ? 0 : mesh.nx() - 1) : f.cross;
    const int cy = f.axis == 1 ? (f.line == 0 ? 0 : mesh.ny() - 1) : f.cross;
    const double w = 1.0 / mesh.cell_h(cx, cy);
    const double len = facet_length(mesh, f);
    const EdgeTrace tr = edge_trace(space, cx, cy, f, rule, false);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(tr.dofs.size(), tr.dofs.size());
    for (int p = 0; p < rule.size(); ++p) {
      local += (w * rule.weights[p] * len) * tr.val.row(p).transpose() * tr.val.row(p);
    }
    for (size_t r = 0; r < tr.dofs.size(); ++r) {
      for (size_t c = 0; c < tr.dofs.size(); ++c) {
        if (local(r, c) != 0.0) trip.emplace_back(tr.dofs[r], tr.dofs[c], local(r, c));
      }
    }
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trip);
}

SpMat boundary_flux(const Space2D& trial, const Space2D& test,
                    std::span<const double> csq) {
  const Mesh2D& mesh = trial.mesh();
  const QuadRule rule =
      gauss_rule(volume_rule_points(std::max(trial.degree(), test.degree())));
  std::vector<Triplet> trip;
  for (const auto& f : mesh.boundary_facets()) {
    const int cx = f.axis == 0 ? (f.line == 0 ? 0 : mesh.nx() - 1) : f.cross;
    const int cy = f.axis == 1 ? (f.line == 0 ? 0 : mesh.ny() - 1) : f.cross;
    const double nrm = f.line == 0 ? -1.0 : 1.0;  // outward normal sign
    const double len = facet_length(mesh, f);
    const double c2 = csq[mesh.cell_id(cx, cy)];
    const EdgeTrace ta = edge_trace(trial, cx, cy, f, rule, true);
    const EdgeTrace tb = edge_trace(test, cx, cy, f, rule, false);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(tb.dofs.size(), ta.dofs.size());
    for (int p = 0; p < rule.size(); ++p) {
      local += (c2 * nrm * rule.weights[p] * len) * tb.val.row(p).transpose() *
               ta.dnormal.row(p);
    }
    for (size_t r = 0; r < tb.dofs.size(); ++r) {
      for (size_t c = 0; c < ta.dofs.size(); ++c) {
        if (local(r, c) != 0.0) trip.emplace_back(tb.dofs[r], ta.dofs[c], local(r, c));
      }
    }
  }
  return from_triplets(test.n_dofs(), trial.n_dofs(), trip);
}

// ---- boundary data rhs -----------------------------------------------------

// per-slab penalty-weighted trace integral sum_F h_F^{-1} (g, psi_b phi)_F
void boundary_rhs_slab(const Space1D& space, const TimePartition& tp, int slab,
                       const LagrangeLine& tline, const QuadRule& trule,
                       const ExactSolution& g, Eigen::VectorXd& out) {
  const Mesh1D& mesh = space.mesh();
  Eigen::MatrixXd tv;
  tline.tabulate(trule.points, tv, nullptr);
  const int nsp = space.n_dofs();
  for (int side = 0; side < 2; ++side) {
    const int c = side == 0 ? 0 : mesh.n_cells() - 1;
    const double x = side == 0 ? 0.0 : 1.0;
    const double w = 1.0 / mesh.cell_h(c);
    const PointBasis pb = space.basis_in_cell(c, x, 0.0, 0);
    for (int p = 0; p < trule.size(); ++p) {
      const double t = tp.node(slab) + trule.points[p] * tp.dt;
      const double gv = g.value(x, 0.0, t) * trule.weights[p] * tp.dt * w;
      if (gv == 0.0) continue;
      for (int b = 0; b <= tline.degree; ++b) {
        for (size_t j = 0; j < pb.dofs.size(); ++j) {
          out[b * nsp + pb.dofs[j]] += gv * tv(p, b) * pb.val[j];
        }
      }
    }
  }
}

void boundary_rhs_slab(const Space2D& space, const TimePartition& tp, int slab,
                       const LagrangeLine& tline, const QuadRule& trule,
                       const ExactSolution& g, Eigen::VectorXd& out) {
  const Mesh2D& mesh = space.mesh();
  const QuadRule srule = gauss_rule(data_rule_points(space.degree()));
  Eigen::MatrixXd tv;
  tline.tabulate(trule.points, tv, nullptr);
  const int nsp = space.n_dofs();
  for (const auto& f : mesh.boundary_facets()) {
    const int cx = f.axis == 0 ? (f.line == 0 ? 0 : mesh.nx() - 1) : f.cross;
    const int cy = f.axis == 1 ? (f.line == 0 ? 0 : mesh.ny() - 1) : f.cross;
    const double w = 1.0 / mesh.cell_h(cx, cy);
    const double len = facet_length(mesh, f);
    const EdgeTrace tr = edge_trace(space, cx, cy, f, srule, false);
    for (int ps = 0; ps < srule.size(); ++ps) {
      double px, py;
      if (f.axis == 0) {
        px = mesh.xs[f.line];
        py = mesh.ys[f.cross] + srule.points[ps] * mesh.cell_hy(f.cross);
      } else {
        px = mesh.xs[f.cross] + srule.points[ps] * mesh.cell_hx(f.cross);
        py = mesh.ys[f.line];
      }
      for (int p = 0; p < trule.size(); ++p) {
        const double t = tp.node(slab) + trule.points[p] * tp.dt;
        const double gv = g.value(px, py, t) * trule.weights[p] * tp.dt * w *
                          srule.weights[ps] * len;
        if (gv == 0.0) continue;
        for (int b = 0; b <= tline.degree; ++b) {
          for (size_t j = 0; j < tr.dofs.size(); ++j) {
            out[b * nsp + tr.dofs[j]] += gv * tv(p, b) * tr.val(ps, j);
          }
        }
      }
    }
  }
}

// ---- fitted-domain helpers -------------------------------------------------

void check_fitted_1d(const Mesh1D& mesh, const DataDomain& dom) {
  for (const auto& b : dom.boxes) {
    for (double edge : {b.x0, b.x1}) {
      if (edge <= 0.0 || edge >= 1.0) continue;
      bool on_vertex = false;
      for (double v : mesh.vertices) {
        if (std::abs(v - edge) < kFitTol) { on_vertex = true; break; }
      }
      if (!on_vertex) {
        throw std::invalid_argument("data domain boundary " + std::to_string(edge) +
                                    " does not coincide with a mesh vertex");
      }
    }
  }
}

void check_fitted_2d(const Mesh2D& mesh, const DataDomain& dom) {
  auto on_line = [](const std::vector<double>& lines, double v) {
    for (double l : lines) {
      if (std::abs(l - v) < kFitTol) return true;
    }
    return false;
  };
  for (const auto& b : dom.boxes) {
    for (double e : {b.x0, b.x1}) {
      if (e > 0.0 && e < 1.0 && !on_line(mesh.xs, e)) {
        throw std::invalid_argument("data domain x-boundary not on a gridline");
      }
    }
    for (double e : {b.y0, b.y1}) {
      if (e > 0.0 && e < 1.0 && !on_line(mesh.ys, e)) {
        throw std::invalid_argument("data domain y-boundary not on a gridline");
      }
    }
  }
}

}  // namespace

std::vector<double> cell_coefficients(const Mesh1D& mesh, const WaveSpeedModel& speed) {
  speed.validate();
  std::vector<double> csq(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) csq[c] = speed.csq_at(mesh.cell_mid(c));
  return csq;
}

std::vector<double> cell_coefficients(const Mesh2D& mesh, const WaveSpeedModel& speed) {
  speed.validate();
  std::vector<double> csq(mesh.n_cells());
  for (int cy = 0; cy < mesh.ny(); ++cy) {
    for (int cx = 0; cx < mesh.nx(); ++cx) {
      csq[mesh.cell_id(cx, cy)] = speed.csq_at(mesh.cell_mid_x(cx));
    }
  }
  return csq;
}

template <class Space>
std::vector<int> domain_cells(const Space& space, const DataDomain& dom) {
  std::vector<int> cells;
  if constexpr (Space::dim() == 1) {
    check_fitted_1d(space.mesh(), dom);
    for (int c = 0; c < space.n_cells(); ++c) {
      if (dom.contains(space.mesh().cell_mid(c))) cells.push_back(c);
    }
  } else {
    check_fitted_2d(space.mesh(), dom);
    const Mesh2D& mesh = space.mesh();
    for (int cy = 0; cy < mesh.ny(); ++cy) {
      for (int cx = 0; cx < mesh.nx(); ++cx) {
        if (dom.contains(mesh.cell_mid_x(cx), mesh.cell_mid_y(cy))) {
          cells.push_back(mesh.cell_id(cx, cy));
        }
      }
    }
  }
  return cells;
}

template <class Space>
SpMat assemble_wave_form(const Space& primal, const Space& dual,
                         std::span<const double> cell_csq,
                         const TimePartition& tp, int q, int qstar) {
  const LagrangeLine tq(q), ts(qstar);
  const double dt = tp.dt;
  SpMat mx, kx;
  cross_volume_forms(primal, dual, cell_csq, &mx, &kx);
  const SpMat bflux = boundary_flux(primal, dual, cell_csq);

  const Eigen::MatrixXd t_dtrial = time_form(tq, ts, 1, 0, dt);
  const Eigen::MatrixXd t_mass = time_form(tq, ts, 0, 0, dt);

  const int nsp = primal.n_dofs();
  const int nsd = dual.n_dofs();
  DofLayout lay{nsp, nsd, q, qstar, tp.n_slabs};
  std::vector<Triplet> trip;
  for (int n = 0; n < tp.n_slabs; ++n) {
    const int u1 = lay.primal_index(n, 0, 0, 0);
    const int u2 = lay.primal_index(n, 1, 0, 0);
    const int y1 = lay.dual_index(n, 0, 0, 0);
    const int y2 = lay.dual_index(n, 1, 0, 0);
    // (d_t u2, y1) + c^2 (grad u1, grad y1) + (d_t u1 - u2, y2)
    //   - (c^2 grad u1 . n, y1) on the lateral boundary
    add_kron(trip, t_dtrial, mx, y1, u2, nsd, nsp);
    add_kron(trip, t_mass, kx, y1, u1, nsd, nsp);
    add_kron(trip, t_dtrial, mx, y2, u1, nsd, nsp);
    add_kron(trip, t_mass, mx, y2, u2, nsd, nsp, -1.0);
    add_kron(trip, t_mass, bflux, y1, u1, nsd, nsp, -1.0);
  }
  return from_triplets(lay.n_dual(), lay.n_primal(), trip);
}

template <class Space>
SpMat assemble_primal_stabilizer(const Space& primal,
                                 std::span<const double> cell_csq,
                                 const TimePartition& tp, int q,
                                 const StabilizerWeights& sw) {
  const LagrangeLine tq(q);
  const double dt = tp.dt;
  SpMat mass;
  volume_forms(primal, cell_csq, &mass, nullptr, nullptr);
  SpMat gmm, gml, gll;
  gls_forms(primal, cell_csq, &gmm, &gml, &gll);
  const SpMat jf = cip_form(primal, cell_csq);
  const SpMat bp = boundary_penalty(primal, cell_csq);

  const Eigen::MatrixXd t00 = time_form(tq, tq, 0, 0, dt);
  const Eigen::MatrixXd t10 = time_form(tq, tq, 1, 0, dt);  // trial derivative
  const Eigen::MatrixXd t01 = time_form(tq, tq, 0, 1, dt);  // test derivative
  const Eigen::MatrixXd t11 = time_form(tq, tq, 1, 1, dt);

  const int nsp = primal.n_dofs();
  DofLayout lay{nsp, 1, q, 0, tp.n_slabs};
  std::vector<Triplet> trip;
  for (int n = 0; n < tp.n_slabs; ++n) {
    const int u1 = lay.primal_index(n, 0, 0, 0);
    const int u2 = lay.primal_index(n, 1, 0, 0);
    // compatibility (u2 - d_t u1, w2 - d_t w1)
    add_kron(trip, t00, mass, u2, u2, nsp, nsp, sw.compat);
    add_kron(trip, t10, mass, u2, u1, nsp, nsp, -sw.compat);
    add_kron(trip, t01, mass, u1, u2, nsp, nsp, -sw.compat);
    add_kron(trip, t11, mass, u1, u1, nsp, nsp, sw.compat);
    // element least squares (d_t u2 - c^2 lap u1, d_t w2 - c^2 lap w1), h^2
    add_kron(trip, t11, gmm, u2, u2, nsp, nsp, sw.gls);
    add_kron(trip, t01, gml, u2, u1, nsp, nsp, -sw.gls);  // trial lap, test d_t
    add_kron(trip, t10, SpMat(gml.transpose()), u1, u2, nsp, nsp, -sw.gls);
    add_kron(trip, t00, gll, u1, u1, nsp, nsp, sw.gls);
    // facet flux-jump penalty and boundary penalty
    add_kron(trip, t00, jf, u1, u1, nsp, nsp, sw.cip);
    add_kron(trip, t00, bp, u1, u1, nsp, nsp, sw.bdry);
  }
  return from_triplets(lay.n_primal(), lay.n_primal(), trip);
}

template <class Space>
SpMat assemble_dual_stabilizer(const Space& dual, std::span<const double> cell_csq,
                               const TimePartition& tp, int qstar,
                               const StabilizerWeights& sw) {
  const LagrangeLine ts(qstar);
  const double dt = tp.dt;
  SpMat mass, stiff;
  volume_forms(dual, cell_csq, &mass, &stiff, nullptr);
  const SpMat bp = boundary_penalty(dual, cell_csq);
  const Eigen::MatrixXd t00 = time_form(ts, ts, 0, 0, dt);

  const int nsd = dual.n_dofs();
  DofLayout lay{1, nsd, 0, qstar, tp.n_slabs};
  std::vector<Triplet> trip;
  SpMat z1block = mass + stiff + bp;
  for (int n = 0; n < tp.n_slabs; ++n) {
    const int z1 = lay.dual_index(n, 0, 0, 0);
    const int z2 = lay.dual_index(n, 1, 0, 0);
    add_kron(trip, t00, z1block, z1, z1, nsd, nsd, sw.dual);
    add_kron(trip, t00, mass, z2, z2, nsd, nsd, sw.dual);
  }
  return from_triplets(lay.n_dual(), lay.n_dual(), trip);
}

template <class Space>
SpMat assemble_time_jump_stabilizer(const Space& primal,
                                    std::span<const double> cell_csq,
                                    const TimePartition& tp, int q,
                                    const StabilizerWeights& sw) {
  const LagrangeLine tq(q);
  SpMat mass, stiff4;
  volume_forms(primal, cell_csq, &mass, nullptr, &stiff4);

  std::vector<double> tr_lo(q + 1), tr_hi(q + 1);
  tq.eval(0.0, tr_lo);
  tq.eval(1.0, tr_hi);

  const int nsp = primal.n_dofs();
  DofLayout lay{nsp, 1, q, 0, tp.n_slabs};
  std::vector<Triplet> trip;
  const double dt = tp.dt;
  for (int node = 1; node <= tp.n_slabs - 1; ++node) {
    // jump at t_node: right trace of slab `node` minus left trace of `node-1`
    struct Part { int slab; const std::vector<double>* tr; double sign; };
    const Part parts[2] = {{node, &tr_lo, 1.0}, {node - 1, &tr_hi, -1.0}};
    for (const Part& pr : parts) {
      for (const Part& pc : parts) {
        Eigen::MatrixXd tt(q + 1, q + 1);
        for (int b = 0; b <= q; ++b) {
          for (int a = 0; a <= q; ++a) {
            tt(b, a) = pr.sign * pc.sign * (*pr.tr)[b] * (*pc.tr)[a];
          }
        }
        const int r1 = lay.primal_index(pr.slab, 0, 0, 0);
        const int c1 = lay.primal_index(pc.slab, 0, 0, 0);
        const int r2 = lay.primal_index(pr.slab, 1, 0, 0);
        const int c2 = lay.primal_index(pc.slab, 1, 0, 0);
        add_kron(trip, tt, mass, r1, c1, nsp, nsp, sw.time_jump / dt);
        add_kron(trip, tt, stiff4, r1, c1, nsp, nsp, sw.time_jump * dt);
        add_kron(trip, tt, mass, r2, c2, nsp, nsp, sw.time_jump / dt);
      }
    }
  }
  return from_triplets(lay.n_primal(), lay.n_primal(), trip);
}

template <class Space>
std::pair<SpMat, Eigen::VectorXd> assemble_data_terms(const Space& primal,
                                                      const TimePartition& tp,
                                                      int q,
                                                      const DataDomain& omega,
                                                      const DataSampler& data) {
  const std::vector<int> cells = domain_cells(primal, omega);
  const SpMat mass_w = mass_on_cells(primal, cells);

  const LagrangeLine tq(q);
  const Eigen::MatrixXd t00 = time_form(tq, tq, 0, 0, tp.dt);
  const int nsp = primal.n_dofs();
  DofLayout lay{nsp, 1, q, 0, tp.n_slabs};
  std::vector<Triplet> trip;
  for (int n = 0; n < tp.n_slabs; ++n) {
    const int u1 = lay.primal_index(n, 0, 0, 0);
    add_kron(trip, t00, mass_w, u1, u1, nsp, nsp);
  }
  SpMat block = from_triplets(lay.n_primal(), lay.n_primal(), trip);

  // right-hand side with elevated quadrature in space and time
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lay.n_primal());
  const QuadRule srule = gauss_rule(data_rule_points(primal.degree()));
  const QuadRule trule = gauss_rule(data_rule_points(q));
  Eigen::MatrixXd tv;
  tq.tabulate(trule.points, tv, nullptr);
  for (int c : cells) {
    const CellQuad cq = primal.cell_quadrature(c, srule, 0);
    for (int n = 0; n < tp.n_slabs; ++n) {
      const int base = lay.primal_index(n, 0, 0, 0);
      for (int pt = 0; pt < trule.size(); ++pt) {
        const double t = tp.node(n) + trule.points[pt] * tp.dt;
        const double wt = trule.weights[pt] * tp.dt;
        for (int p = 0; p < cq.n_points(); ++p) {
          const double y = Space::dim() == 2 ? cq.y[p] : 0.0;
          const double uw = data(cq.x[p], y, t) * cq.w[p] * wt;
          if (uw == 0.0) continue;
          for (int b = 0; b <= q; ++b) {
            const double tb = tv(pt, b) * uw;
            for (int j = 0; j < cq.n_loc(); ++j) {
              rhs[base + b * nsp + cq.dofs[j]] += tb * cq.val(p, j);
            }
          }
        }
      }
    }
  }
  return {std::move(block), std::move(rhs)};
}

template <class Space>
Eigen::VectorXd assemble_boundary_data_rhs(const Space& primal,
                                           const TimePartition& tp, int q,
                                           const ExactSolution& trace) {
  const LagrangeLine tq(q);
  const QuadRule trule = gauss_rule(data_rule_points(q));
  DofLayout lay{primal.n_dofs(), 1, q, 0, tp.n_slabs};
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lay.n_primal());
  for (int n = 0; n < tp.n_slabs; ++n) {
    Eigen::VectorXd slab = Eigen::VectorXd::Zero((q + 1) * primal.n_dofs());
    boundary_rhs_slab(primal, tp, n, tq, trule, trace, slab);
    rhs.segment(lay.primal_index(n, 0, 0, 0), slab.size()) = slab;
  }
  return rhs;
}

template <class Space>
SaddleSystem assemble_system(const Space& primal, const Space& dual,
                             std::span<const double> cell_csq,
                             const TimePartition& tp, const DataDomain& omega,
                             const ExactSolution& data,
                             const AssemblyOptions& opts) {
  SaddleSystem sys;
  sys.layout = DofLayout{primal.n_dofs(), dual.n_dofs(), opts.q, opts.qstar,
                         tp.n_slabs};

  sys.wave_form = assemble_wave_form(primal, dual, cell_csq, tp, opts.q, opts.qstar);
  sys.stab_primal = assemble_primal_stabilizer(primal, cell_csq, tp, opts.q, opts.weights);
  sys.stab_dual = assemble_dual_stabilizer(dual, cell_csq, tp, opts.qstar, opts.weights);
  sys.stab_time_jump = assemble_time_jump_stabilizer(primal, cell_csq, tp, opts.q, opts.weights);
  DataSampler sampler{&data, &omega};
  auto [mass_w, data_rhs] = assemble_data_terms(primal, tp, opts.q, omega, sampler);
  sys.mass_data = std::move(mass_w);

  Eigen::VectorXd rhs_primal = data_rhs;
  if (opts.boundary_data) {
    rhs_primal += opts.weights.bdry *
                  assemble_boundary_data_rhs(primal, tp, opts.q, data);
  }

  const DofLayout& lay = sys.layout;
  std::vector<Triplet> trip;
  const SpMat k_block = sys.stab_primal + sys.stab_time_jump + sys.mass_data;
  trip.reserve(k_block.nonZeros() + 2 * sys.wave_form.nonZeros() +
               sys.stab_dual.nonZeros());
  for (int col = 0; col < k_block.outerSize(); ++col) {
    for (SpMat::InnerIterator it(k_block, col); it; ++it) {
      trip.emplace_back(lay.global_of_primal(it.row()),
                        lay.global_of_primal(it.col()), it.value());
    }
  }
  for (int col = 0; col < sys.wave_form.outerSize(); ++col) {
    for (SpMat::InnerIterator it(sys.wave_form, col); it; ++it) {
      const int gd = lay.global_of_dual(it.row());
      const int gp = lay.global_of_primal(it.col());
      trip.emplace_back(gd, gp, it.value());
      trip.emplace_back(gp, gd, it.value());
    }
  }
  for (int col = 0; col < sys.stab_dual.outerSize(); ++col) {
    for (SpMat::InnerIterator it(sys.stab_dual, col); it; ++it) {
      trip.emplace_back(lay.global_of_dual(it.row()), lay.global_of_dual(it.col()),
                        -it.value());
    }
  }
  sys.matrix = from_triplets(lay.n_total(), lay.n_total(), trip);

  sys.rhs = Eigen::VectorXd::Zero(lay.n_total());
  for (int p = 0; p < lay.n_primal(); ++p) {
    sys.rhs[lay.global_of_primal(p)] = rhs_primal[p];
  }
  return sys;
}

DiscreteField extract_field(const Eigen::VectorXd& solution,
                            const DofLayout& lay, int field) {
  const bool dual = field >= 2;
  const int f = dual ? field - 2 : field;
  const int q = dual ? lay.qstar : lay.q;
  const int nsp = dual ? lay.n_space_dual : lay.n_space_primal;
  DiscreteField out = DiscreteField::zero(q, nsp, lay.n_slabs);
  for (int n = 0; n < lay.n_slabs; ++n) {
    for (int a = 0; a <= q; ++a) {
      for (int i = 0; i < nsp; ++i) {
        const int g = dual ? lay.global_of_dual(lay.dual_index(n, f, a, i))
                           : lay.global_of_primal(lay.primal_index(n, f, a, i));
        out.slabs[n][a * nsp + i] = solution[g];
      }
    }
  }
  return out;
}

Eigen::VectorXd primal_part(const Eigen::VectorXd& global, const DofLayout& lay) {
  Eigen::VectorXd out(lay.n_primal());
  for (int p = 0; p < lay.n_primal(); ++p) out[p] = global[lay.global_of_primal(p)];
  return out;
}

Eigen::VectorXd dual_part(const Eigen::VectorXd& global, const DofLayout& lay) {
  Eigen::VectorXd out(lay.n_dual());
  for (int d = 0; d < lay.n_dual(); ++d) out[d] = global[lay.global_of_dual(d)];
  return out;
}

void write_coo(const SpMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[128];
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SpMat::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()),
                    static_cast<int>(it.col()), it.value());
      out << buf;
    }
  }
}

// explicit instantiations
#define STWAVE_INSTANTIATE(Space)                                              \
  template std::vector<int> domain_cells<Space>(const Space&, const DataDomain&); \
  template SpMat assemble_wave_form<Space>(const Space&, const Space&,         \
                                           std::span<const double>,            \
                                           const TimePartition&, int, int);    \
  template SpMat assemble_primal_stabilizer<Space>(                            \
      const Space&, std::span<const double>, const TimePartition&, int,        \
      const StabilizerWeights&);                                               \
  template SpMat assemble_dual_stabilizer<Space>(                              \
      const Space&, std::span<const double>, const TimePartition&, int,        \
      const StabilizerWeights&);                                               \
  template SpMat assemble_time_jump_stabilizer<Space>(                         \
      const Space&, std::span<const double>, const TimePartition&, int,        \
      const StabilizerWeights&);                                               \
  template std::pair<SpMat, Eigen::VectorXd> assemble_data_terms<Space>(       \
      const Space&, const TimePartition&, int, const DataDomain&,              \
      const DataSampler&);                                                     \
  template Eigen::VectorXd assemble_boundary_data_rhs<Space>(                  \
      const Space&, const TimePartition&, int, const ExactSolution&);          \
  template SaddleSystem assemble_system<Space>(                                \
      const Space&, const Space&, std::span<const double>, const TimePartition&, \
      const DataDomain&, const ExactSolution&, const AssemblyOptions&);

STWAVE_INSTANTIATE(Space1D)
STWAVE_INSTANTIATE(Space2D)
#undef STWAVE_INSTANTIATE

}  // namespace stwave
