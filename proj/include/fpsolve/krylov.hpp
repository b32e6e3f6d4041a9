#pragma once

#include <string>
#include <utility>

#include "fpsolve/types.hpp"

namespace fpsolve {

struct SolveOptions {
  double tol = 1e-12;   // relative residual target
  int max_iter = 0;     // 0 = 10 * n
  bool precondition = true;  // Jacobi left preconditioning
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // true relative residual |Ax-b|/|b|
  bool converged = false;
  std::string method;
};

struct SolveError : std::runtime_error {
  SolveReport report;
  SolveError(const std::string& msg, SolveReport rep)
      : std::runtime_error(msg), report(std::move(rep)) {}
};

// BiCGStab with diagonal preconditioning; restarted GMRES picks up on
// breakdown. Deterministic for identical inputs. Throws SolveError if the
// residual contract cannot be met.
std::pair<Vector, SolveReport> solve(const SparseMat& A, const Vector& rhs,
                                     const SolveOptions& opts = {},
                                     const Vector* initial_guess = nullptr);

// Dense LU inverse for small-system oracles (n <= 4096).
Matrix dense_inverse(const SparseMat& A);

}  // namespace fpsolve
