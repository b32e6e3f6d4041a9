#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "fpsolve/assembly.hpp"
#include "fpsolve/krylov.hpp"
#include "fpsolve/problem.hpp"

using namespace fpsolve;

namespace {

SparseMat sparse_from_dense(const Matrix& D) {
  SparseMat A(D.rows(), D.cols());
  std::vector<Triplet> t;
  for (int i = 0; i < D.rows(); ++i)
    for (int j = 0; j < D.cols(); ++j)
      if (D(i, j) != 0.0) t.emplace_back(i, j, D(i, j));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace

TEST_CASE("identity solves in at most one sweep") {
  SparseMat I(6, 6);
  I.setIdentity();
  Vector rhs(6);
  rhs << 1, -2, 3, 0.5, -0.25, 4;
  const auto [x, rep] = solve(I, rhs);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 1);
  CHECK((x - rhs).norm() <= 1e-14 * rhs.norm());
}

TEST_CASE("zero rhs short circuits") {
  SparseMat I(4, 4);
  I.setIdentity();
  const auto [x, rep] = solve(I, Vector::Zero(4));
  CHECK(rep.converged);
  CHECK(x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random diagonally dominant system matches the dense factorization") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 20;
  Matrix D = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double offsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = unif(rng);
      offsum += std::abs(D(i, j));
    }
    D(i, i) = offsum + 1.0 + std::abs(unif(rng));
  }
  Vector rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = unif(rng);
  const SparseMat A = sparse_from_dense(D);
  SolveOptions opts;
  opts.tol = 1e-13;
  const auto [x, rep] = solve(A, rhs, opts);
  CHECK(rep.converged);
  const Vector x_lu = D.partialPivLu().solve(rhs);
  CHECK((x - x_lu).cwiseAbs().maxCoeff() <= 1e-10 * x_lu.cwiseAbs().maxCoeff());
}

TEST_CASE("assembled steady system returns the constant ratio") {
  const ProblemSpec p = catalog_problem("smile");
  const Grid g = build_grid(p.bounds, 8, SchemeOrder::Fourth, 2);
  const SampledFields f = sample(p, g);
  const SchemeOperator op = assemble(g, f, p.diffusion, 0.02);
  const double K = 2.5;
  const Vector rhs = f.M * K;
  const auto [x, rep] = solve(op.A, rhs);
  CHECK(rep.converged);
  CHECK((x.array() - K).abs().maxCoeff() <= 1e-9 * K);
}

TEST_CASE("preconditioning does not change the solution beyond tolerance") {
  const ProblemSpec p = catalog_problem("cross");
  const Grid g = build_grid(p.bounds, 8, SchemeOrder::Second, 2);
  const SampledFields f = sample(p, g);
  const SchemeOperator op = assemble(g, f, p.diffusion, 0.02);
  Vector rhs = f.M.cwiseProduct(f.g0);
  SolveOptions with, without;
  with.precondition = true;
  without.precondition = false;
  const auto [x1, r1] = solve(op.A, rhs, with);
  const auto [x2, r2] = solve(op.A, rhs, without);
  CHECK(r1.converged);
  CHECK(r2.converged);
  const double scale = x1.cwiseAbs().maxCoeff();
  CHECK((x1 - x2).cwiseAbs().maxCoeff() <= 1e-9 * scale);
}

TEST_CASE("an inconsistent singular system raises a solve error with its report") {
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = 1.0;
  D(1, 1) = 1.0;  // third row identically zero
  const SparseMat A = sparse_from_dense(D);
  Vector rhs(3);
  rhs << 1, 1, 1;
  CHECK_THROWS_AS((void)solve(A, rhs), SolveError);
  try {
    (void)solve(A, rhs);
  } catch (const SolveError& e) {
    CHECK(!e.report.converged);
    CHECK(e.report.iterations >= 0);
  }
}

TEST_CASE("dense inverse on closed forms") {
  SparseMat I(5, 5);
  I.setIdentity();
  CHECK((dense_inverse(I) - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);

  Matrix D(2, 2);
  D << 2, -1, -1, 2;
  const Matrix inv = dense_inverse(sparse_from_dense(D));
  CHECK(inv(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(inv(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(inv(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(inv(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK((Matrix(sparse_from_dense(D)) * inv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-14);
}

TEST_CASE("dense inverse refuses large systems") {
  SparseMat I(4097, 4097);
  I.setIdentity();
  CHECK_THROWS_AS((void)dense_inverse(I), ConfigError);
}
