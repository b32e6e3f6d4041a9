#include "fpsolve/simulate.hpp"

#include <cmath>
#include <limits>

namespace fpsolve {

namespace {

double entropy_or_nan(const Vector& g, const Vector& M, const Vector& w, PhiEntropy f) {
  if (f == PhiEntropy::Kl && g.minCoeff() <= 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return phi_entropy(g, M, w, f);
}

TraceRow make_row(const State& s, const SampledFields& fields, const Vector& w,
                  PhiEntropy entropy, int iters, double residual) {
  TraceRow row;
  row.step = s.step;
  row.time = s.time;
  row.mass = w.dot(s.rho);
  Vector dev = s.g.array() - 1.0;
  row.chi2 = (w.array() * fields.M.array() * dev.array().square()).sum();
  row.entropy = entropy_or_nan(s.g, fields.M, w, entropy);
  row.min_rho = s.rho.minCoeff();
  row.solver_iterations = iters;
  row.residual = residual;
  return row;
}

}  // namespace

double phi_entropy(const Vector& g, const Vector& M, const Vector& w, PhiEntropy f) {
  if (g.size() != M.size() || g.size() != w.size())
    throw ConfigError("phi_entropy: size mismatch");
  if (f == PhiEntropy::Chi2) {
    Vector dev = g.array() - 1.0;
    return (w.array() * M.array() * dev.array().square()).sum();
  }
  double sum = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (g[i] <= 0.0)
      throw std::domain_error("phi_entropy: kl entropy needs positive density ratio, g[" +
                              std::to_string(i) + "]=" + std::to_string(g[i]));
    sum += w[i] * M[i] * (g[i] * std::log(g[i]) - g[i] + 1.0);
  }
  return sum;
}

std::pair<State, SolveReport> step(const State& state, const SchemeOperator& op,
                                   const SampledFields& fields, const SolveOptions& solver) {
  const Vector rhs = build_rhs(fields, state.g, op.dt);
  std::pair<Vector, SolveReport> sol;
  try {
    sol = solve(op.A, rhs, solver, &state.g);
  } catch (const SolveError& e) {
    throw SolveError("step " + std::to_string(state.step + 1) + ": " + e.what(), e.report);
  }
  State next;
  next.step = state.step + 1;
  next.time = next.step * op.dt;
  next.g = std::move(sol.first);
  next.rho = fields.M.cwiseProduct(next.g);
  return {std::move(next), sol.second};
}

RunResult run(const Grid& grid, const SampledFields& fields, double diffusion, double dt,
              const RunOptions& opts) {
  if (!opts.stop.final_time && !opts.stop.max_steps && !opts.stop.steady_tol)
    throw ConfigError("run: no stop rule given");
  RunResult res;
  res.op = assemble(grid, fields, diffusion, dt);

  State state;
  state.step = 0;
  state.time = 0.0;
  state.g = fields.g0;
  state.rho = fields.M.cwiseProduct(state.g);

  res.trace.rows.push_back(make_row(state, fields, res.op.w, opts.entropy, 0, 0.0));

  int limit = std::numeric_limits<int>::max();
  if (opts.stop.final_time)
    limit = static_cast<int>(std::ceil(*opts.stop.final_time / dt - 1e-9));
  if (opts.stop.max_steps) limit = std::min(limit, *opts.stop.max_steps);
  const double steady_scale = fields.rho0.cwiseAbs().maxCoeff();

  while (state.step < limit) {
    auto [next, rep] = step(state, res.op, fields, opts.solver);
    res.trace.rows.push_back(
        make_row(next, fields, res.op.w, opts.entropy, rep.iterations, rep.residual));
    const double change = (next.rho - state.rho).cwiseAbs().maxCoeff() / dt;
    state = std::move(next);
    if (opts.observer) opts.observer(state);
    if (opts.stop.steady_tol && change < *opts.stop.steady_tol * steady_scale) break;
  }
  res.trace.decay = fit_decay_rate(res.trace, opts.fit_window);
  res.final_state = std::move(state);
  return res;
}

RunResult run(const ProblemSpec& problem, const Grid& grid, const RunOptions& opts) {
  const SampledFields fields = sample(problem, grid);
  return run(grid, fields, problem.diffusion, problem.time_step, opts);
}

std::optional<DecayFit> fit_decay_rate(const RunTrace& trace, int window) {
  const auto& rows = trace.rows;
  if (rows.empty()) return std::nullopt;
  if (rows.back().chi2 == 0.0) {
    DecayFit fit;
    fit.exact = true;
    fit.factor = 0.0;
    fit.rate = 1.0;
    return fit;
  }
  const int end = static_cast<int>(rows.size());
  const int begin = std::max(0, end - window);
  double sn = 0, sy = 0, snn = 0, sny = 0;
  int count = 0;
  for (int k = begin; k < end; ++k) {
    if (!(rows[k].chi2 > 0.0)) return std::nullopt;  // mixed trailing window
    const double n = rows[k].step, y = std::log(rows[k].chi2);
    sn += n;
    sy += y;
    snn += n * n;
    sny += n * y;
    ++count;
  }
  if (count < 3) return std::nullopt;
  const double denom = count * snn - sn * sn;
  if (denom == 0.0) return std::nullopt;
  const double slope = (count * sny - sn * sy) / denom;
  DecayFit fit;
  fit.exact = false;
  fit.factor = std::exp(slope);
  fit.rate = 1.0 - fit.factor;
  fit.points = count;
  return fit;
}

}  // namespace fpsolve
