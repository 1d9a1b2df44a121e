#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace romforge {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class MatrixSymmetry { Symmetric, General };

struct LinearSolveOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 5000;
};

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Solves A x = b iteratively, starting from the incoming x. Symmetric
/// positive definite systems use preconditioned conjugate gradients,
/// general systems BiCGSTAB; both use a Jacobi preconditioner.
LinearSolveStats solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                              MatrixSymmetry symmetry, const LinearSolveOptions& options = {});


/// Conjugate-gradient solver for a sequence of symmetric positive definite
/// systems with a fixed sparsity pattern and slowly varying coefficients.
/// A sparse LDL^T factorization of an earlier matrix serves as the
/// preconditioner and is refreshed when the iteration count grows.
class ReusedFactorSolver {
 public:
  explicit ReusedFactorSolver(int refactor_after = 8) : refactor_after_(refactor_after) {}

  LinearSolveStats solve(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                         const LinearSolveOptions& options = {});

  int factorizations() const { return factorizations_; }

 private:
  void factorize(const SparseMatrix& a);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
  bool stale_ = true;
  int refactor_after_;
  int factorizations_ = 0;
};

}  // namespace romforge
