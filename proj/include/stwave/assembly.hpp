#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "stwave/fe_space.hpp"
#include "stwave/mesh.hpp"
#include "stwave/problem.hpp"

namespace stwave {

using SpMat = Eigen::SparseMatrix<double>;

/// Global unknown layout. Slab-major; within a slab the primal trace/velocity
/// pair (u1,u2) comes first, then the dual pair (z1,z2). Field layers are
/// time-node-major over spatial dofs.
struct DofLayout {
  int n_space_primal = 0, n_space_dual = 0;
  int q = 1, qstar = 1;
  int n_slabs = 0;

  int primal_per_slab() const { return 2 * (q + 1) * n_space_primal; }
  int dual_per_slab() const { return 2 * (qstar + 1) * n_space_dual; }
  int stride() const { return primal_per_slab() + dual_per_slab(); }
  int n_primal() const { return n_slabs * primal_per_slab(); }
  int n_dual() const { return n_slabs * dual_per_slab(); }
  int n_total() const { return n_slabs * stride(); }

  // field: 0 = u1, 1 = u2 (primal); 0 = z1, 1 = z2 (dual)
  int primal_index(int slab, int field, int layer, int dof) const {
    return slab * primal_per_slab() + (field * (q + 1) + layer) * n_space_primal + dof;
  }
  int dual_index(int slab, int field, int layer, int dof) const {
    return slab * dual_per_slab() + (field * (qstar + 1) + layer) * n_space_dual + dof;
  }
  int global_of_primal(int p) const {
    int slab = p / primal_per_slab();
    return slab * stride() + (p - slab * primal_per_slab());
  }
  int global_of_dual(int d) const {
    int slab = d / dual_per_slab();
    return slab * stride() + primal_per_slab() + (d - slab * dual_per_slab());
  }
};

/// Assembled saddle-point system together with its constituent blocks.
/// The global matrix is [K A^T; A -S*] with K = mass_data + stab_primal +
/// stab_time_jump, mapped into the slab-major layout. Blocks are kept in
/// primal/dual-local numbering for diagnostics.
struct SaddleSystem {
  DofLayout layout;
  SpMat matrix;          // n_total x n_total, symmetric
  Eigen::VectorXd rhs;   // data + boundary-data terms, primal u1 rows only
  SpMat stab_primal;     // n_primal^2
  SpMat stab_time_jump;  // n_primal^2
  SpMat mass_data;       // n_primal^2 (u1 block)
  SpMat stab_dual;       // n_dual^2
  SpMat wave_form;       // n_dual x n_primal
};

/// Scaling constants of the individual stabilizer parts.
struct StabilizerWeights {
  double cip = 1.0;        // facet flux-jump penalty
  double gls = 1.0;        // element residual least squares
  double compat = 1.0;     // velocity compatibility u2 = d_t u1
  double bdry = 1.0;       // boundary trace penalty
  double time_jump = 1.0;  // slab interface jumps
  double dual = 1.0;       // dual damping
};

struct AssemblyOptions {
  int q = 1;
  int qstar = 1;
  /// Include the penalty-weighted boundary trace of the reference solution on
  /// the right-hand side (needed whenever the solution does not vanish on the
  /// lateral boundary).
  bool boundary_data = true;
  StabilizerWeights weights;
};

/// Squared wave speed per cell of a fitted mesh.
std::vector<double> cell_coefficients(const Mesh1D& mesh, const WaveSpeedModel& speed);
std::vector<double> cell_coefficients(const Mesh2D& mesh, const WaveSpeedModel& speed);

/// Cells whose midpoint lies in the domain. Also verifies the fitted-mesh
/// assumption: no box boundary may cross a cell interior.
template <class Space>
std::vector<int> domain_cells(const Space& space, const DataDomain& dom);

// Individual forms. Row indices are test functions, columns trial functions.
// wave_form rows live in the dual space, everything else is square.
template <class Space>
SpMat assemble_wave_form(const Space& primal, const Space& dual,
                         std::span<const double> cell_csq,
                         const TimePartition& tp, int q, int qstar);
template <class Space>
SpMat assemble_primal_stabilizer(const Space& primal,
                                 std::span<const double> cell_csq,
                                 const TimePartition& tp, int q,
                                 const StabilizerWeights& w = {});
template <class Space>
SpMat assemble_dual_stabilizer(const Space& dual,
                               std::span<const double> cell_csq,
                               const TimePartition& tp, int qstar,
                               const StabilizerWeights& w = {});
template <class Space>
SpMat assemble_time_jump_stabilizer(const Space& primal,
                                    std::span<const double> cell_csq,
                                    const TimePartition& tp, int q,
                                    const StabilizerWeights& w = {});
template <class Space>
std::pair<SpMat, Eigen::VectorXd> assemble_data_terms(const Space& primal,
                                                      const TimePartition& tp,
                                                      int q,
                                                      const DataDomain& omega,
                                                      const DataSampler& data);
template <class Space>
Eigen::VectorXd assemble_boundary_data_rhs(const Space& primal,
                                           const TimePartition& tp, int q,
                                           const ExactSolution& trace);

template <class Space>
SaddleSystem assemble_system(const Space& primal, const Space& dual,
                             std::span<const double> cell_csq,
                             const TimePartition& tp, const DataDomain& omega,
                             const ExactSolution& data,
                             const AssemblyOptions& opts);

/// Extract one field of the solution vector as a DiscreteField.
/// field: 0 = u1, 1 = u2, 2 = z1, 3 = z2.
DiscreteField extract_field(const Eigen::VectorXd& solution,
                            const DofLayout& layout, int field);

/// Split a global vector into primal-local and dual-local parts.
Eigen::VectorXd primal_part(const Eigen::VectorXd& global, const DofLayout& layout);
Eigen::VectorXd dual_part(const Eigen::VectorXd& global, const DofLayout& layout);

/// Dump in coordinate text format: one "row col value" line per nonzero.
void write_coo(const SpMat& m, const std::string& path);

}  // namespace stwave
