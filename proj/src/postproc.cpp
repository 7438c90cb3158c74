#include "stwave/postproc.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

namespace stwave {

namespace {

// spatial L2 norm over the given cells of (field slice - exact slice) at a
// fixed time; layer holds the time-collapsed spatial coefficients
template <class Space>
double slice_l2_sq(const Eigen::VectorXd& layer, const Space& space,
                   const std::vector<CellQuad>& tabs, const ExactSolution* exact,
                   bool exact_dt, double t) {
  double acc = 0.0;
  for (const CellQuad& cq : tabs) {
    for (int p = 0; p < cq.n_points(); ++p) {
      double v = 0.0;
      for (int j = 0; j < cq.n_loc(); ++j) v += layer[cq.dofs[j]] * cq.val(p, j);
      if (exact) {
        const double y = Space::dim() == 2 ? cq.y[p] : 0.0;
        v -= exact_dt ? exact->dt(cq.x[p], y, t) : exact->value(cq.x[p], y, t);
      }
      acc += cq.w[p] * v * v;
    }
  }
  return acc;
}

template <class Space>
std::vector<CellQuad> tabulate_cells(const Space& space, const std::vector<int>& cells,
                                     int n_points, int max_deriv = 0) {
  const QuadRule rule = gauss_rule(n_points);
  std::vector<CellQuad> tabs;
  tabs.reserve(cells.size());
  for (int c : cells) tabs.push_back(space.cell_quadrature(c, rule, max_deriv));
  return tabs;
}

// collapse the slab coefficients with the given time-basis weights
Eigen::VectorXd collapse(const DiscreteField& f, int slab,
                         const std::vector<double>& psi) {
  Eigen::VectorXd layer = Eigen::VectorXd::Zero(f.n_space);
  for (int a = 0; a <= f.q; ++a) {
    if (psi[a] != 0.0) layer += psi[a] * f.slabs[slab].segment(a * f.n_space, f.n_space);
  }
  return layer;
}

}  // namespace

template <class Space>
std::vector<int> region_cells(const Space& space,
                              const std::optional<DataDomain>& region) {
  if (!region) {
    std::vector<int> all(space.n_cells());
    for (int c = 0; c < space.n_cells(); ++c) all[c] = c;
    return all;
  }
  return domain_cells(space, *region);
}

template <class Space>
double error_linf_l2(const DiscreteField& u1, const Space& space,
                     const TimePartition& tp, const ExactSolution& exact,
                     const std::vector<int>& cells) {
  const auto tabs = tabulate_cells(space, cells, data_rule_points(space.degree()));
  const LagrangeLine tline(u1.q);
  const QuadRule trule = gauss_rule(u1.q + 2);
  std::vector<double> samples(trule.points.begin(), trule.points.end());
  samples.push_back(0.0);  // slab endpoint traces
  samples.push_back(1.0);
  std::vector<double> psi(u1.q + 1);
  double worst = 0.0;
  for (int n = 0; n < tp.n_slabs; ++n) {
    for (double tau : samples) {
      tline.eval(tau, psi);
      const Eigen::VectorXd layer = collapse(u1, n, psi);
      const double t = tp.node(n) + tau * tp.dt;
      worst = std::max(worst, slice_l2_sq(layer, space, tabs, &exact, false, t));
    }
  }
  return std::sqrt(worst);
}

template <class Space>
double error_l2_l2_dt(const DiscreteField& u1, const Space& space,
                      const TimePartition& tp, const ExactSolution& exact,
                      const std::vector<int>& cells) {
  const auto tabs = tabulate_cells(space, cells, data_rule_points(space.degree()));
  const LagrangeLine tline(u1.q);
  const QuadRule trule = gauss_rule(data_rule_points(u1.q));
  std::vector<double> dpsi(u1.q + 1);
  double acc = 0.0;
  for (int n = 0; n < tp.n_slabs; ++n) {
    for (int p = 0; p < trule.size(); ++p) {
      tline.eval(trule.points[p], {}, dpsi);
      for (double& v : dpsi) v /= tp.dt;
      const Eigen::VectorXd layer = collapse(u1, n, dpsi);
      const double t = tp.node(n) + trule.points[p] * tp.dt;
      acc += trule.weights[p] * tp.dt *
             slice_l2_sq(layer, space, tabs, &exact, true, t);
    }
  }
  return std::sqrt(acc);
}

template <class Space>
double error_l2_l2(const DiscreteField& u1, const Space& space,
                   const TimePartition& tp, const ExactSolution& exact,
                   const std::vector<int>& cells) {
  const auto tabs = tabulate_cells(space, cells, data_rule_points(space.degree()));
  const LagrangeLine tline(u1.q);
  const QuadRule trule = gauss_rule(data_rule_points(u1.q));
  std::vector<double> psi(u1.q + 1);
  double acc = 0.0;
  for (int n = 0; n < tp.n_slabs; ++n) {
    for (int p = 0; p < trule.size(); ++p) {
      tline.eval(trule.points[p], psi);
      const Eigen::VectorXd layer = collapse(u1, n, psi);
      const double t = tp.node(n) + trule.points[p] * tp.dt;
      acc += trule.weights[p] * tp.dt *
             slice_l2_sq(layer, space, tabs, &exact, false, t);
    }
  }
  return std::sqrt(acc);
}

template <class Space>
double error_l2_at_time(const DiscreteField& u1, const Space& space,
                        const TimePartition& tp, const ExactSolution& exact,
                        double t, TraceSide side, const std::vector<int>& cells,
                        bool relative) {
  const auto tabs = tabulate_cells(space, cells, data_rule_points(space.degree()));
  const SlabPoint sp = locate_time(tp, t, side);
  const LagrangeLine tline(u1.q);
  std::vector<double> psi(u1.q + 1);
  tline.eval(sp.tau, psi);
  const Eigen::VectorXd layer = collapse(u1, sp.slab, psi);
  double err = std::sqrt(slice_l2_sq(layer, space, tabs, &exact, false, t));
  if (relative) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(u1.n_space);
    const double ref = std::sqrt(slice_l2_sq(zero, space, tabs, &exact, false, t));
    if (ref > 0.0) err /= ref;
  }
  return err;
}

template <class Space>
DiscreteField best_approximation(const ExactSolution& exact, const Space& space,
                                 const TimePartition& tp, int q) {
  const int nsp = space.n_dofs();
  DiscreteField out = DiscreteField::zero(q, nsp, tp.n_slabs);

  // space mass matrix (exact for the basis) and its factorization
  const QuadRule mrule = gauss_rule(volume_rule_points(space.degree()));
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < space.n_cells(); ++c) {
    const CellQuad cq = space.cell_quadrature(c, mrule, 0);
    for (int p = 0; p < cq.n_points(); ++p) {
      for (int r = 0; r < cq.n_loc(); ++r) {
        for (int s = 0; s < cq.n_loc(); ++s) {
          trip.emplace_back(cq.dofs[r], cq.dofs[s],
                            cq.w[p] * cq.val(p, r) * cq.val(p, s));
        }
      }
    }
  }
  SpMat mass(nsp, nsp);
  mass.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> mass_chol(mass);

  // time mass on the reference slab
  const LagrangeLine tline(q);
  Eigen::MatrixXd tmass = Eigen::MatrixXd::Zero(q + 1, q + 1);
  {
    const QuadRule tr = gauss_rule(q + 2);
    Eigen::MatrixXd tv;
    tline.tabulate(tr.points, tv, nullptr);
    for (int p = 0; p < tr.size(); ++p) {
      tmass += tr.weights[p] * tv.row(p).transpose() * tv.row(p);
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> tmass_lu(tmass);

  // elevated rhs, then back-substitution in time and space
  const QuadRule srule = gauss_rule(data_rule_points(space.degree()));
  const QuadRule trule = gauss_rule(data_rule_points(q));
  Eigen::MatrixXd tv;
  tline.tabulate(trule.points, tv, nullptr);
  std::vector<int> all_cells(space.n_cells());
  for (int c = 0; c < space.n_cells(); ++c) all_cells[c] = c;
  const auto tabs = tabulate_cells(space, all_cells, data_rule_points(space.degree()));

  for (int n = 0; n < tp.n_slabs; ++n) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(q + 1, nsp);
    for (const CellQuad& cq : tabs) {
      for (int pt = 0; pt < trule.size(); ++pt) {
        const double t = tp.node(n) + trule.points[pt] * tp.dt;
        // reference time weight; the dt factors cancel against the mass
        const double wt = trule.weights[pt];
        for (int p = 0; p < cq.n_points(); ++p) {
          const double y = Space::dim() == 2 ? cq.y[p] : 0.0;
          const double uv = exact.value(cq.x[p], y, t) * cq.w[p] * wt;
          if (uv == 0.0) continue;
          for (int b = 0; b <= q; ++b) {
            const double tb = tv(pt, b) * uv;
            for (int j = 0; j < cq.n_loc(); ++j) rhs(b, cq.dofs[j]) += tb * cq.val(p, j);
          }
        }
      }
    }
    const Eigen::MatrixXd y = tmass_lu.solve(rhs);
    for (int a = 0; a <= q; ++a) {
      out.slabs[n].segment(a * nsp, nsp) = mass_chol.solve(y.row(a).transpose());
    }
  }
  return out;
}

StabilityNorms stability_norms(const SaddleSystem& sys,
                               const Eigen::VectorXd& solution) {
  StabilityNorms norms;
  const Eigen::VectorXd up = primal_part(solution, sys.layout);
  const Eigen::VectorXd zd = dual_part(solution, sys.layout);
  norms.stab_primal_sq = up.dot(sys.stab_primal * up);
  norms.time_jump_sq = up.dot(sys.stab_time_jump * up);
  norms.data_sq = up.dot(sys.mass_data * up);
  norms.dual_sq = zd.dot(sys.stab_dual * zd);
  return norms;
}

template <class Space>
double strong_norm_extra(const DiscreteField& u1, const DiscreteField& u2,
                         const Space& space, std::span<const double> cell_csq,
                         const TimePartition& tp) {
  const QuadRule srule = gauss_rule(volume_rule_points(space.degree()));
  const QuadRule trule = gauss_rule(u1.q + 2);
  const LagrangeLine tline(u1.q);
  std::vector<double> psi(u1.q + 1), dpsi(u1.q + 1);
  double acc = 0.0;
  std::vector<CellQuad> tabs;
  for (int c = 0; c < space.n_cells(); ++c) {
    tabs.push_back(space.cell_quadrature(c, srule, 2));
  }
  for (int n = 0; n < tp.n_slabs; ++n) {
    for (int pt = 0; pt < trule.size(); ++pt) {
      tline.eval(trule.points[pt], psi, dpsi);
      for (double& v : dpsi) v /= tp.dt;
      const double wt = trule.weights[pt] * tp.dt;
      const Eigen::VectorXd l1 = collapse(u1, n, psi);
      const Eigen::VectorXd l1t = collapse(u1, n, dpsi);
      const Eigen::VectorXd l2 = collapse(u2, n, psi);
      const Eigen::VectorXd l2t = collapse(u2, n, dpsi);
      for (size_t ci = 0; ci < tabs.size(); ++ci) {
        const CellQuad& cq = tabs[ci];
        const double c2 = cell_csq[ci];
        const double h2 = space.cell_h(static_cast<int>(ci)) *
                          space.cell_h(static_cast<int>(ci));
        for (int p = 0; p < cq.n_points(); ++p) {
          double v1 = 0, v1t = 0, v2 = 0, v2t = 0, gx = 0, gy = 0;
          double hxx = 0, hxy = 0, hyy = 0;
          for (int j = 0; j < cq.n_loc(); ++j) {
            const int d = cq.dofs[j];
            v1 += l1[d] * cq.val(p, j);
            v1t += l1t[d] * cq.val(p, j);
            v2 += l2[d] * cq.val(p, j);
            v2t += l2t[d] * cq.val(p, j);
            gx += l1[d] * cq.dx(p, j);
            hxx += l1[d] * cq.dxx(p, j);
            if (Space::dim() == 2) {
              gy += l1[d] * cq.dy(p, j);
              hxy += l1[d] * cq.dxy(p, j);
              hyy += l1[d] * cq.dyy(p, j);
            }
          }
          const double grad_sq = gx * gx + gy * gy;
          const double hess_sq = hxx * hxx + hyy * hyy + 2.0 * hxy * hxy;
          acc += cq.w[p] * wt *
                 (v2t * v2t + c2 * c2 * grad_sq + v1t * v1t + v2 * v2 +
                  h2 * c2 * c2 * (v1 * v1 + grad_sq + hess_sq));
        }
      }
    }
  }
  return acc;
}

#define STWAVE_INSTANTIATE(Space)                                                \
  template std::vector<int> region_cells<Space>(const Space&,                    \
                                                const std::optional<DataDomain>&); \
  template double error_linf_l2<Space>(const DiscreteField&, const Space&,       \
                                       const TimePartition&, const ExactSolution&, \
                                       const std::vector<int>&);                 \
  template double error_l2_l2_dt<Space>(const DiscreteField&, const Space&,      \
                                        const TimePartition&, const ExactSolution&, \
                                        const std::vector<int>&);                \
  template double error_l2_l2<Space>(const DiscreteField&, const Space&,         \
                                     const TimePartition&, const ExactSolution&, \
                                     const std::vector<int>&);                   \
  template double error_l2_at_time<Space>(const DiscreteField&, const Space&,    \
                                          const TimePartition&, const ExactSolution&, \
                                          double, TraceSide, const std::vector<int>&, \
                                          bool);                                 \
  template DiscreteField best_approximation<Space>(const ExactSolution&,         \
                                                   const Space&,                 \
                                                   const TimePartition&, int);   \
  template double strong_norm_extra<Space>(const DiscreteField&,                 \
                                           const DiscreteField&, const Space&,   \
                                           std::span<const double>,              \
                                           const TimePartition&);

STWAVE_INSTANTIATE(Space1D)
STWAVE_INSTANTIATE(Space2D)
#undef STWAVE_INSTANTIATE

}  // namespace stwave
