#include "romforge/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>

namespace romforge {

LinearSolveStats solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                              MatrixSymmetry symmetry, const LinearSolveOptions& options) {
  LinearSolveStats stats;
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  if (b.norm() == 0.0) {
    x.setZero();
    stats.converged = true;
    return stats;
  }
  if (symmetry == MatrixSymmetry::Symmetric) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(options.relative_tolerance);
    cg.setMaxIterations(options.max_iterations);
    cg.compute(a);
    x = cg.solveWithGuess(b, x);
    stats.iterations = static_cast<int>(cg.iterations());
    stats.relative_residual = cg.error();
    stats.converged = cg.info() == Eigen::Success;
  } else {
    Eigen::BiCGSTAB<SparseMatrix> bicg;
    bicg.setTolerance(options.relative_tolerance);
    bicg.setMaxIterations(options.max_iterations);
    bicg.compute(a);
    x = bicg.solveWithGuess(b, x);
    stats.iterations = static_cast<int>(bicg.iterations());
    stats.relative_residual = bicg.error();
    stats.converged = bicg.info() == Eigen::Success;
  }
  return stats;
}

void ReusedFactorSolver::factorize(const SparseMatrix& a) {
  const Eigen::SparseMatrix<double> ac = a;
  if (!analyzed_) {
    ldlt_.analyzePattern(ac);
    analyzed_ = true;
  }
  ldlt_.factorize(ac);
  stale_ = ldlt_.info() != Eigen::Success;
  ++factorizations_;
}

LinearSolveStats ReusedFactorSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                                           const LinearSolveOptions& options) {
  LinearSolveStats stats;
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    stats.converged = true;
    return stats;
  }
  const bool fresh = stale_;
  if (stale_) factorize(a);
  if (stale_) return solve_linear(a, b, x, MatrixSymmetry::Symmetric, options);

  // Preconditioned conjugate gradients.
  Eigen::VectorXd r = b - a * x;
  Eigen::VectorXd z = ldlt_.solve(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double target = options.relative_tolerance * bnorm;
  double rnorm = r.norm();
  int it = 0;
  while (rnorm > target && it < options.max_iterations) {
    const Eigen::VectorXd ap = a * p;
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    rnorm = r.norm();
    ++it;
    if (rnorm <= target) break;
    z = ldlt_.solve(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  stats.iterations = it;
  stats.relative_residual = rnorm / bnorm;
  stats.converged = rnorm <= target;
  if (it > refactor_after_ || !stats.converged) stale_ = true;
  if (!stats.converged && !fresh) return solve(a, b, x, options);
  return stats;
}

}  // namespace romforge
