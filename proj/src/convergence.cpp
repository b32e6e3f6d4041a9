#include "fpsolve/convergence.hpp"

#include <cmath>
#include <limits>

namespace fpsolve {

std::vector<ConvergenceRow> convergence_study(const ProblemSpec& problem, SchemeOrder order,
                                              const std::vector<int>& grid_sizes,
                                              double final_time, const SolveOptions& solver) {
  if (!problem.exact_density)
    throw ConfigError("convergence_study: problem has no exact density");
  if (grid_sizes.size() < 2) throw ConfigError("convergence_study: need at least two grids");

  std::vector<ConvergenceRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const int n : grid_sizes) {
    if (n < 3) throw ConfigError("convergence_study: grid too small");
    int cells;
    if (order == SchemeOrder::Second) {
      cells = n - 1;
    } else {
      if (n % 2 == 0) throw ConfigError("convergence_study: fourth order needs odd N");
      cells = (n - 1) / 2;
    }
    const Grid grid = build_grid(problem.bounds, cells, order, problem.dimension);
    const double dt = grid.bounds[0].width() / (n - 1);  // dt = dx

    RunOptions opts;
    opts.stop.final_time = final_time;
    opts.solver = solver;
    ProblemSpec p = problem;
    p.time_step = dt;
    const RunResult res = run(p, grid, opts);

    double linf = 0.0, l2sq = 0.0;
    for (int q = 0; q < grid.points(); ++q) {
      const double err =
          std::abs(res.final_state.rho[q] - (*problem.exact_density)(grid.x(q), grid.y(q)));
      linf = std::max(linf, err);
      l2sq += err * err;
    }
    const double cellvol = grid.dimension == 2 ? grid.h * grid.h : grid.h;
    ConvergenceRow row;
    row.n = n;
    row.l2_error = std::sqrt(cellvol * l2sq);
    row.linf_error = linf;
    if (rows.empty()) {
      row.l2_order = nan;
      row.linf_order = nan;
    } else {
      row.l2_order = std::log2(rows.back().l2_error / row.l2_error);
      row.linf_order = std::log2(rows.back().linf_error / row.linf_error);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fpsolve
