#pragma once

#include <string>
#include <vector>

#include "fpsolve/grid.hpp"
#include "fpsolve/simulate.hpp"

namespace fpsolve {

// All floats serialize with 17 significant digits so reruns are
// byte-comparable.
std::string fmt17(double v);

void write_text(const std::string& path, const std::string& content);

// Field snapshot: header `x,rho` (1D) or `x,y,rho` (2D), flattened order.
void write_field_csv(const std::string& path, const Grid& grid, const Vector& rho);

// Trace schema: n,t,mass,chi2,entropy,min_rho,solver_iters,residual
void write_trace_csv(const std::string& path, const RunTrace& trace);

struct ConvergenceRow {
  int n = 0;  // grid points per axis
  double l2_error = 0.0;
  double l2_order = 0.0;  // NaN on the first row
  double linf_error = 0.0;
  double linf_order = 0.0;
};

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

}  // namespace fpsolve
