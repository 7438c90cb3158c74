#pragma once

#include <optional>

#include "stwave/assembly.hpp"
#include "stwave/fe_space.hpp"
#include "stwave/problem.hpp"

namespace stwave {

/// Named error and diagnostic values of one run.
struct ErrorReport {
  double err_linf_l2_u = 0.0;    // L-infty(0,T; L2(region)) of u1
  double err_l2_l2_ut = 0.0;     // L2(0,T; L2(region)) of d_t u1
  double ba_linf_l2_u = 0.0;     // same errors for the L2 best approximation
  double ba_l2_l2_ut = 0.0;
  double err_t0_l2 = 0.0;        // L2(Omega) error of the right trace at t=0
  double norm_stab_primal = 0.0; // |U|_{S}
  double norm_time_jump = 0.0;   // |U| of the time-jump form
  double norm_data = 0.0;        // ||u1|| over the data window
  double norm_dual = 0.0;        // ||Z|| in the dual stabilizer norm
  double strong_norm_extra = -1.0;  // optional strengthened-norm addition
  double probe_time = -1.0;
  double probe_l2_rel = -1.0;    // relative L2(Omega) error of u1 at probe_time
  double solver_residual = 0.0;
  int refinement_steps = 0;
  int n_dofs = 0;
  int n_slabs = 0;
  double h = 0.0;
  double dt = 0.0;
};

/// Cells of the region (all cells when region is not given).
template <class Space>
std::vector<int> region_cells(const Space& space,
                              const std::optional<DataDomain>& region);

/// Max over the per-slab time samples (q+2 Gauss points plus both endpoint
/// traces) of the spatial L2 error over the region cells.
template <class Space>
double error_linf_l2(const DiscreteField& u1, const Space& space,
                     const TimePartition& tp, const ExactSolution& exact,
                     const std::vector<int>& cells);

/// L2-in-time, L2-in-space error of the time derivative.
template <class Space>
double error_l2_l2_dt(const DiscreteField& u1, const Space& space,
                      const TimePartition& tp, const ExactSolution& exact,
                      const std::vector<int>& cells);

/// Space-time L2 error of the field values over the region.
template <class Space>
double error_l2_l2(const DiscreteField& u1, const Space& space,
                   const TimePartition& tp, const ExactSolution& exact,
                   const std::vector<int>& cells);

/// Spatial L2 error at a fixed time; side selects the trace at slab nodes.
/// When relative, the error is divided by the L2 norm of the exact slice.
template <class Space>
double error_l2_at_time(const DiscreteField& u1, const Space& space,
                        const TimePartition& tp, const ExactSolution& exact,
                        double t, TraceSide side, const std::vector<int>& cells,
                        bool relative);

/// Slab-wise space-time L2 projection onto the tensor space of degree (k,q).
template <class Space>
DiscreteField best_approximation(const ExactSolution& exact, const Space& space,
                                 const TimePartition& tp, int q);

/// Squared components of the stability norm evaluated through the assembled
/// blocks: primal stabilizer, time-jump form, data-window mass, dual
/// stabilizer. Their sum equals the quadratic form of the system matrix under
/// the (U, -Z) test pairing.
struct StabilityNorms {
  double stab_primal_sq = 0.0;
  double time_jump_sq = 0.0;
  double data_sq = 0.0;
  double dual_sq = 0.0;
  double total_sq() const {
    return stab_primal_sq + time_jump_sq + data_sq + dual_sq;
  }
};
StabilityNorms stability_norms(const SaddleSystem& sys,
                               const Eigen::VectorXd& solution);

/// The additional volume terms of the strengthened stability norm:
/// per slab ||d_t u2||^2 + ||c^2 grad u1||^2 + ||d_t u1||^2 + ||u2||^2
/// plus the h^2-weighted H2(cell) norm of c^2 u1. Returns the sum (squared).
template <class Space>
double strong_norm_extra(const DiscreteField& u1, const DiscreteField& u2,
                         const Space& space, std::span<const double> cell_csq,
                         const TimePartition& tp);

}  // namespace stwave
