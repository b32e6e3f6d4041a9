#include "fpsolve/krylov.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

#include <limits>

namespace fpsolve {

namespace {

double true_residual(const SparseMat& A, const Vector& x, const Vector& rhs, double rhs_norm) {
  return (A * x - rhs).norm() / rhs_norm;
}

template <class Solver>
void run_solver(Solver& solver, const SparseMat& A, const Vector& rhs, const Vector& guess,
                double tol, int max_iter, Vector& x, int& iters) {
  solver.setTolerance(tol);
  solver.setMaxIterations(max_iter);
  solver.compute(A);
  x = solver.solveWithGuess(rhs, guess);
  iters = static_cast<int>(solver.iterations());
}

}  // namespace

std::pair<Vector, SolveReport> solve(const SparseMat& A, const Vector& rhs,
                                     const SolveOptions& opts, const Vector* initial_guess) {
  const auto n = A.rows();
  if (A.cols() != n) throw ConfigError("solve: matrix must be square");
  if (rhs.size() != n) throw ConfigError("solve: rhs size mismatch");
  if (!(opts.tol > 0.0)) throw ConfigError("solve: tol must be positive");
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n);

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return {Vector::Zero(n), {0, 0.0, true, "trivial"}};

  const Vector guess = initial_guess ? *initial_guess : Vector(Vector::Zero(n));
  Vector x;
  int iters = 0;

  if (opts.precondition) {
    Eigen::BiCGSTAB<SparseMat, Eigen::DiagonalPreconditioner<double>> bicg;
    run_solver(bicg, A, rhs, guess, opts.tol, max_iter, x, iters);
  } else {
    Eigen::BiCGSTAB<SparseMat, Eigen::IdentityPreconditioner> bicg;
    run_solver(bicg, A, rhs, guess, opts.tol, max_iter, x, iters);
  }
  double res = true_residual(A, x, rhs, rhs_norm);
  if (res <= opts.tol && x.allFinite()) return {std::move(x), {iters, res, true, "bicgstab"}};

  // breakdown or stagnation: restarted GMRES from the best iterate so far
  const Vector gmres_guess = x.allFinite() ? x : guess;
  int git = 0;
  if (opts.precondition) {
    Eigen::GMRES<SparseMat, Eigen::DiagonalPreconditioner<double>> gmres;
    gmres.set_restart(60);
    run_solver(gmres, A, rhs, gmres_guess, opts.tol, max_iter, x, git);
  } else {
    Eigen::GMRES<SparseMat, Eigen::IdentityPreconditioner> gmres;
    gmres.set_restart(60);
    run_solver(gmres, A, rhs, gmres_guess, opts.tol, max_iter, x, git);
  }
  res = x.allFinite() ? true_residual(A, x, rhs, rhs_norm) : std::numeric_limits<double>::infinity();
  SolveReport rep{iters + git, res, res <= opts.tol, "gmres"};
  if (!rep.converged)
    throw SolveError("linear solve failed: relative residual " + std::to_string(res) +
                         " after " + std::to_string(rep.iterations) + " iterations",
                     rep);
  return {std::move(x), rep};
}

Matrix dense_inverse(const SparseMat& A) {
  const auto n = A.rows();
  if (A.cols() != n) throw ConfigError("dense_inverse: matrix must be square");
  if (n > 4096) throw ConfigError("dense_inverse: refusing n > 4096 (got " +
                                  std::to_string(n) + ")");
  Matrix dense = Matrix(A);
  Eigen::PartialPivLU<Matrix> lu(dense);
  Matrix inv = lu.inverse();
  if (!inv.allFinite()) throw std::runtime_error("dense_inverse: numerically singular matrix");
  return inv;
}

}  // namespace fpsolve
