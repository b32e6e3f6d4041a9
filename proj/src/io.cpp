#include "fpsolve/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace fpsolve {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
  if (!out) throw ConfigError("failed writing: " + path);
}

void write_field_csv(const std::string& path, const Grid& grid, const Vector& rho) {
  if (rho.size() != grid.points()) throw ConfigError("write_field_csv: size mismatch");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  if (grid.dimension == 1) {
    out << "x,rho\n";
    for (int p = 0; p < grid.points(); ++p)
      out << fmt17(grid.x(p)) << ',' << fmt17(rho[p]) << '\n';
  } else {
    out << "x,y,rho\n";
    for (int p = 0; p < grid.points(); ++p)
      out << fmt17(grid.x(p)) << ',' << fmt17(grid.y(p)) << ',' << fmt17(rho[p]) << '\n';
  }
  if (!out) throw ConfigError("failed writing: " + path);
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << "n,t,mass,chi2,entropy,min_rho,solver_iters,residual\n";
  for (const auto& r : trace.rows) {
    out << r.step << ',' << fmt17(r.time) << ',' << fmt17(r.mass) << ',' << fmt17(r.chi2)
        << ',' << fmt17(r.entropy) << ',' << fmt17(r.min_rho) << ',' << r.solver_iterations
        << ',' << fmt17(r.residual) << '\n';
  }
  if (!out) throw ConfigError("failed writing: " + path);
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << "N,l2_error,l2_order,linf_error,linf_order\n";
  for (const auto& r : rows) {
    out << r.n << ',' << fmt17(r.l2_error) << ',';
    if (!std::isnan(r.l2_order)) out << fmt17(r.l2_order);
    out << ',' << fmt17(r.linf_error) << ',';
    if (!std::isnan(r.linf_order)) out << fmt17(r.linf_order);
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing: " + path);
}

}  // namespace fpsolve
