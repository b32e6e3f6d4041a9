#pragma once

#include <vector>

#include "fpsolve/io.hpp"
#include "fpsolve/problem.hpp"
#include "fpsolve/simulate.hpp"

namespace fpsolve {

// Manufactured-solution refinement study with dt = dx and the stated final
// time; grid_sizes are points per axis (odd, so both orders share them).
// l2 error is sqrt(dx*dy * sum |rho_i - rho(x_i)|^2); orders are log2 ratios
// on successive grids. The problem must carry an exact density.
std::vector<ConvergenceRow> convergence_study(const ProblemSpec& problem, SchemeOrder order,
                                              const std::vector<int>& grid_sizes,
                                              double final_time,
                                              const SolveOptions& solver = {});

}  // namespace fpsolve
