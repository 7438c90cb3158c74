#pragma once

#include <Eigen/Sparse>
#include <memory>

namespace stwave {

/// Direct sparse LU factorization of a (structurally symmetric, generally
/// indefinite) matrix. Deterministic: repeated factorizations of the same
/// matrix yield bit-identical factors and solutions.
class SparseFactorization {
 public:
  explicit SparseFactorization(const Eigen::SparseMatrix<double>& m);
  ~SparseFactorization();
  SparseFactorization(SparseFactorization&&) noexcept;
  SparseFactorization& operator=(SparseFactorization&&) noexcept;

  int rows() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  struct Result {
    Eigen::VectorXd x;
    double rel_residual = 0.0;  // inf-norm of (b - M x) over inf-norm of b
    int refinement_steps = 0;
  };
  /// Solve with one monitored step of iterative refinement when the first
  /// residual exceeds 1e-10 relative.
  Result solve_refined(const Eigen::SparseMatrix<double>& m,
                       const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stwave
