#include "stwave/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <stdexcept>

namespace stwave {

// The saddle matrices here are symmetric quasidefinite (positive primal
// block, negative definite dual block), so unpivoted LDLT is reliable and
// much faster than LU. A pivoted sparse LU remains as fallback for matrices
// where the Cholesky-type factorization breaks down or loses accuracy.
struct SparseFactorization::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>,
                                  Eigen::COLAMDOrdering<int>>> lu;
  int n = 0;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return lu ? lu->solve(b) : Eigen::VectorXd(ldlt.solve(b));
  }
  void make_lu(const Eigen::SparseMatrix<double>& m) {
    lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>,
                                          Eigen::COLAMDOrdering<int>>>();
    lu->analyzePattern(m);
    lu->factorize(m);
    if (lu->info() != Eigen::Success) {
      throw std::runtime_error("sparse LU factorization failed: " +
                               lu->lastErrorMessage());
    }
  }
};

SparseFactorization::SparseFactorization(const Eigen::SparseMatrix<double>& m)
    : impl_(std::make_unique<Impl>()) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("factorization: matrix must be square");
  }
  Eigen::SparseMatrix<double> mc = m;
  mc.makeCompressed();
  impl_->n = static_cast<int>(m.rows());
  impl_->ldlt.compute(mc);
  if (impl_->ldlt.info() != Eigen::Success) {
    impl_->make_lu(mc);
  }
}

SparseFactorization::~SparseFactorization() = default;
SparseFactorization::SparseFactorization(SparseFactorization&&) noexcept = default;
SparseFactorization& SparseFactorization::operator=(SparseFactorization&&) noexcept = default;

int SparseFactorization::rows() const { return impl_->n; }

Eigen::VectorXd SparseFactorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != impl_->n) {
    throw std::invalid_argument("solve: right-hand side has wrong dimension");
  }
  return impl_->solve(b);
}

SparseFactorization::Result SparseFactorization::solve_refined(
    const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& b) const {
  auto attempt = [&](Result& res) {
    res.x = solve(b);
    const double bnorm = b.lpNorm<Eigen::Infinity>();
    if (bnorm == 0.0) {
      res.rel_residual = (m * res.x).lpNorm<Eigen::Infinity>();
      return;
    }
    Eigen::VectorXd r = b - m * res.x;
    res.rel_residual = r.lpNorm<Eigen::Infinity>() / bnorm;
    if (res.rel_residual > 1e-10) {
      res.x += solve(r);
      res.refinement_steps += 1;
      r = b - m * res.x;
      res.rel_residual = r.lpNorm<Eigen::Infinity>() / bnorm;
    }
  };
  Result res;
  attempt(res);
  if (res.rel_residual > 1e-9 && !impl_->lu) {
    // accuracy fallback: refactorize with pivoting
    Eigen::SparseMatrix<double> mc = m;
    mc.makeCompressed();
    impl_->make_lu(mc);
    Result res2;
    attempt(res2);
    if (res2.rel_residual < res.rel_residual) return res2;
  }
  return res;
}

}  // namespace stwave
