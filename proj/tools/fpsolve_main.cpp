#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fpsolve/convergence.hpp"
#include "fpsolve/io.hpp"
#include "fpsolve/monotonicity.hpp"
#include "fpsolve/simulate.hpp"

namespace fs = std::filesystem;
using namespace fpsolve;

namespace {

struct CommonConfig {
  std::string problem = "smile";
  std::string table_path;
  int model = 1;
  int order = 2;
  int cells = 32;
  double dt = 0.0;          // 0 = catalog default
  double diffusion = -1.0;  // <0 = catalog default
  double amplitude = -1.0;
  double wave_number = -1.0;
  double measure_floor = -1.0;
  int table_dim = 2;
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonConfig& c) {
  cmd->add_option("--problem", c.problem,
                  "catalog problem (accuracy|smile|cross) or custom-table");
  cmd->add_option("--table", c.table_path, "CSV table for --problem custom-table");
  cmd->add_option("--model", c.model,
                  "1 = prescribed invariant measure, 2 = raw drift (custom-table only)")
      ->check(CLI::Range(1, 2));
  cmd->add_option("--order", c.order, "spatial order (2 or 4)")->check(CLI::IsMember({2, 4}));
  cmd->add_option("--cells", c.cells, "cells per axis")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", c.dt, "time step");
  cmd->add_option("--diffusion", c.diffusion, "diffusion constant override");
  cmd->add_option("--amplitude", c.amplitude, "stream-function amplitude override");
  cmd->add_option("--wave-number", c.wave_number, "stream-function wave number override");
  cmd->add_option("--eps0", c.measure_floor, "positivity floor for the invariant measure");
  cmd->add_option("--table-dim", c.table_dim, "custom-table dimension (1 or 2)")
      ->check(CLI::Range(1, 2));
  cmd->add_option("--lo-x", c.lo_x, "custom-table domain lower x bound");
  cmd->add_option("--hi-x", c.hi_x, "custom-table domain upper x bound");
  cmd->add_option("--lo-y", c.lo_y, "custom-table domain lower y bound");
  cmd->add_option("--hi-y", c.hi_y, "custom-table domain upper y bound");
  cmd->add_option("--out", c.out_dir, "output directory (default $FPSOLVE_OUTPUT_DIR or .)");
}

std::string resolve_out_dir(const std::string& flag_value) {
  std::string dir = flag_value;
  if (dir.empty()) {
    if (const char* env = std::getenv("FPSOLVE_OUTPUT_DIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

struct Instance {
  ProblemSpec problem;
  Grid grid;
  SampledFields fields;
};

Instance build_instance(const CommonConfig& c) {
  const SchemeOrder order = c.order == 2 ? SchemeOrder::Second : SchemeOrder::Fourth;
  if (c.problem == "custom-table") {
    if (c.table_path.empty()) throw ConfigError("custom-table needs --table");
    ProblemSpec p;
    p.name = "custom-table";
    p.model = c.model == 2 ? ModelKind::Model2 : ModelKind::Model1;
    p.dimension = c.table_dim;
    p.bounds = {AxisBounds{c.lo_x, c.hi_x}, AxisBounds{c.lo_y, c.hi_y}};
    p.diffusion = c.diffusion > 0 ? c.diffusion : 1.0;
    p.time_step = c.dt > 0 ? c.dt : 0.01;
    if (c.measure_floor > 0) p.measure_floor = c.measure_floor;
    Grid grid = build_grid(p.bounds, c.cells, order, p.dimension);
    SampledFields fields = sample_table(c.table_path, grid, p.model, p.measure_floor);
    return {std::move(p), std::move(grid), std::move(fields)};
  }
  if (c.model == 2) throw ConfigError("--model 2 is only available with custom-table input");
  ProblemSpec p = catalog_problem(c.problem);
  if (c.diffusion > 0) p.diffusion = c.diffusion;
  if (c.dt > 0) p.time_step = c.dt;
  if (c.measure_floor > 0) p.measure_floor = c.measure_floor;
  if (auto* flow = std::get_if<CellularFlow>(&p.velocity)) {
    if (c.amplitude >= 0) flow->amplitude = c.amplitude;
    if (c.wave_number > 0) flow->wave_number = c.wave_number;
  }
  Grid grid = build_grid(p.bounds, c.cells, order, p.dimension);
  SampledFields fields = sample(p, grid);
  return {std::move(p), std::move(grid), std::move(fields)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving Fokker-Planck finite-difference solver"};
  app.set_config("--config", "",
                 "key=value file with one [section] per subcommand; flags win on conflict");
  app.require_subcommand(1);

  // ---- run -------------------------------------------------------------
  CommonConfig run_cfg;
  double t_final = -1.0;
  int max_steps = -1;
  bool steady_stop = false;
  double steady_tol = 1e-10;
  std::string entropy_name = "chi2";
  int snap_every = 0;
  bool do_certify = false, do_oracle = false;
  double solver_tol = 1e-12;

  CLI::App* cmd_run = app.add_subcommand("run", "time-step a problem and write diagnostics");
  add_common(cmd_run, run_cfg);
  cmd_run->add_option("--t-final", t_final, "stop at this time");
  cmd_run->add_option("--steps", max_steps, "stop after this many steps");
  cmd_run->add_flag("--steady", steady_stop, "stop at steady state");
  cmd_run->add_option("--steady-tol", steady_tol, "steady-state tolerance per unit time");
  cmd_run->add_option("--entropy", entropy_name, "trace entropy: chi2 or kl")
      ->check(CLI::IsMember({"chi2", "kl"}));
  cmd_run->add_option("--snap-every", snap_every, "also write field_<n>.csv every k steps");
  cmd_run->add_flag("--certify", do_certify, "run the monotonicity certifier first");
  cmd_run->add_flag("--oracle", do_oracle, "with --certify: dense-inverse oracle (n <= 4096)");
  cmd_run->add_option("--solver-tol", solver_tol, "linear solver relative tolerance");

  // ---- convergence -------------------------------------------------------
  CommonConfig conv_cfg;
  std::vector<int> conv_grids{9, 17, 33, 65, 129};
  double conv_t = 1.0;
  double conv_solver_tol = 1e-12;
  CLI::App* cmd_conv =
      app.add_subcommand("convergence", "manufactured-solution refinement study");
  cmd_conv->add_option("--order", conv_cfg.order, "spatial order (2 or 4)")
      ->check(CLI::IsMember({2, 4}));
  cmd_conv->add_option("--grids", conv_grids, "grid sizes N (points per axis, odd)");
  cmd_conv->add_option("--t-final", conv_t, "error measurement time");
  cmd_conv->add_option("--solver-tol", conv_solver_tol, "linear solver relative tolerance");
  cmd_conv->add_option("--out", conv_cfg.out_dir, "output directory");

  // ---- certify -------------------------------------------------------------
  CommonConfig cert_cfg;
  bool cert_oracle = false;
  std::string dump_path;
  CLI::App* cmd_cert =
      app.add_subcommand("certify", "evaluate the monotonicity conditions and certificate");
  add_common(cmd_cert, cert_cfg);
  cmd_cert->add_flag("--oracle", cert_oracle, "dense-inverse oracle (n <= 4096)");
  cmd_cert->add_option("--dump-matrix", dump_path, "write the system matrix (row col value)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const std::string dir = resolve_out_dir(run_cfg.out_dir);
      Instance inst = build_instance(run_cfg);

      RunOptions opts;
      if (t_final > 0) opts.stop.final_time = t_final;
      if (max_steps > 0) opts.stop.max_steps = max_steps;
      if (steady_stop) opts.stop.steady_tol = steady_tol;
      if (!opts.stop.final_time && !opts.stop.max_steps && !opts.stop.steady_tol)
        opts.stop.final_time = inst.problem.final_time;
      opts.entropy = entropy_name == "kl" ? PhiEntropy::Kl : PhiEntropy::Chi2;
      opts.solver.tol = solver_tol;

      std::optional<MonotonicityReport> cert;
      if (do_certify || do_oracle) {
        SchemeOperator op = assemble(inst.grid, inst.fields, inst.problem.diffusion,
                                     inst.problem.time_step);
        CertifyOptions copts;
        copts.run_oracle = do_oracle;
        cert = certify(op, inst.fields, copts);
        write_text(dir + "/report.txt", report_text(*cert));
        write_text(dir + "/report.csv", report_csv(*cert));
      }

      const Vector rho0 = inst.fields.M.cwiseProduct(inst.fields.g0);
      write_field_csv(dir + "/field_0.csv", inst.grid, rho0);
      if (snap_every > 0) {
        opts.observer = [&](const State& s) {
          if (s.step % snap_every == 0)
            write_field_csv(dir + "/field_" + std::to_string(s.step) + ".csv", inst.grid,
                            s.rho);
        };
      }
      RunResult res = run(inst.grid, inst.fields, inst.problem.diffusion,
                          inst.problem.time_step, opts);
      write_field_csv(dir + "/field_" + std::to_string(res.final_state.step) + ".csv",
                      inst.grid, res.final_state.rho);
      write_trace_csv(dir + "/trace.csv", res.trace);

      const auto& rows = res.trace.rows;
      double min_rho = rows.front().min_rho, drift = 0.0;
      for (const auto& r : rows) {
        min_rho = std::min(min_rho, r.min_rho);
        drift = std::max(drift, std::abs(r.mass - rows.front().mass));
      }
      std::string summary;
      summary += "problem: " + inst.problem.name + "\n";
      summary += "order: " + std::to_string(order_value(inst.grid.order)) + "\n";
      summary += "grid: " + std::to_string(inst.grid.n) + " points per axis\n";
      summary += "steps: " + std::to_string(res.final_state.step) + "\n";
      summary += "final time: " + fmt17(res.final_state.time) + "\n";
      summary += "mass drift (absolute): " + fmt17(drift) + "\n";
      summary += "mass drift (relative): " + fmt17(drift / std::abs(rows.front().mass)) + "\n";
      summary += "min density over run: " + fmt17(min_rho) + "\n";
      if (res.trace.decay) {
        summary += std::string("chi2 decay fit: ") +
                   (res.trace.decay->exact
                        ? "exact convergence"
                        : "factor " + fmt17(res.trace.decay->factor) + " per step") +
                   "\n";
      }
      if (cert) summary += std::string("monotonicity: ") + verdict_name(cert->verdict) + "\n";
      write_text(dir + "/summary.txt", summary);
      std::cout << summary;
      return 0;
    }

    if (cmd_conv->parsed()) {
      const std::string dir = resolve_out_dir(conv_cfg.out_dir);
      const ProblemSpec p = catalog_problem("accuracy");
      SolveOptions sopts;
      sopts.tol = conv_solver_tol;
      const auto rows = convergence_study(
          p, conv_cfg.order == 2 ? SchemeOrder::Second : SchemeOrder::Fourth, conv_grids,
          conv_t, sopts);
      write_convergence_csv(dir + "/convergence.csv", rows);
      std::printf("%8s %14s %8s %14s %8s\n", "N", "l2_error", "order", "linf_error", "order");
      for (const auto& r : rows)
        std::printf("%8d %14.6e %8.2f %14.6e %8.2f\n", r.n, r.l2_error, r.l2_order,
                    r.linf_error, r.linf_order);
      return 0;
    }

    if (cmd_cert->parsed()) {
      const std::string dir = resolve_out_dir(cert_cfg.out_dir);
      Instance inst = build_instance(cert_cfg);
      const double dt = cert_cfg.dt > 0 ? cert_cfg.dt : inst.problem.time_step;
      SchemeOperator op = assemble(inst.grid, inst.fields, inst.problem.diffusion, dt);
      if (!dump_path.empty()) dump_matrix(op.A, dump_path);
      CertifyOptions copts;
      copts.run_oracle = cert_oracle;
      MonotonicityReport rep = certify(op, inst.fields, copts);
      write_text(dir + "/report.txt", report_text(rep));
      write_text(dir + "/report.csv", report_csv(rep));
      std::cout << report_text(rep);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const PositivityError& e) {
    std::cerr << "positivity error: " << e.what() << "\n";
    return 1;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
