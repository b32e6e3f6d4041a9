#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fpsolve/assembly.hpp"
#include "fpsolve/krylov.hpp"
#include "fpsolve/problem.hpp"

namespace fpsolve {

enum class PhiEntropy { Chi2, Kl };

struct State {
  int step = 0;
  double time = 0.0;
  Vector g;
  Vector rho;
};

struct TraceRow {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double chi2 = 0.0;
  double entropy = 0.0;
  double min_rho = 0.0;
  int solver_iterations = 0;
  double residual = 0.0;
};

struct DecayFit {
  bool exact = false;    // chi2 hit zero: converged to the invariant measure
  double factor = 0.0;   // per-step geometric factor
  double rate = 1.0;     // 1 - factor
  int points = 0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::optional<DecayFit> decay;
};

struct StopRule {
  std::optional<double> final_time;
  std::optional<int> max_steps;
  std::optional<double> steady_tol;  // on |rho^{n+1}-rho^n|_inf / dt
};

struct RunOptions {
  StopRule stop;
  PhiEntropy entropy = PhiEntropy::Chi2;
  SolveOptions solver;
  int fit_window = 50;
  std::function<void(const State&)> observer;  // called after every step
};

struct RunResult {
  RunTrace trace;
  State final_state;
  SchemeOperator op;
};

// Discrete phi-entropy sum(w_i M_i f(g_i)); Kl needs g > 0 and throws
// std::domain_error otherwise.
double phi_entropy(const Vector& g, const Vector& M, const Vector& w, PhiEntropy f);

// One implicit Euler step: solve A g^{n+1} = M g^n + dt f.
std::pair<State, SolveReport> step(const State& state, const SchemeOperator& op,
                                   const SampledFields& fields, const SolveOptions& solver);

RunResult run(const Grid& grid, const SampledFields& fields, double diffusion, double dt,
              const RunOptions& opts);
RunResult run(const ProblemSpec& problem, const Grid& grid, const RunOptions& opts);

// Least-squares geometric fit of the trailing chi2 trace.
std::optional<DecayFit> fit_decay_rate(const RunTrace& trace, int window);

}  // namespace fpsolve
