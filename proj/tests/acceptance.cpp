// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs in minutes on a laptop.

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fpsolve/convergence.hpp"
#include "fpsolve/monotonicity.hpp"
#include "fpsolve/simulate.hpp"

using namespace fpsolve;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& what, bool pass, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// A fourth-order Model-1 instance with a mild measure so the product-of-
// M-matrices certificate holds at bench scale.
ProblemSpec mild_problem() {
  constexpr double kPi = 3.14159265358979323846;
  ProblemSpec p;
  p.name = "mild";
  p.dimension = 2;
  p.bounds = {AxisBounds{-1.0, 1.0}, AxisBounds{-1.0, 1.0}};
  p.diffusion = 1.0;
  p.measure = [](double x, double y) {
    return 1.0 + 0.5 * std::sin(kPi * x) * std::sin(kPi * y);
  };
  p.measure_dx = [](double x, double y) {
    return 0.5 * kPi * std::cos(kPi * x) * std::sin(kPi * y);
  };
  p.measure_dy = [](double x, double y) {
    return 0.5 * kPi * std::sin(kPi * x) * std::cos(kPi * y);
  };
  p.velocity = CellularFlow{0.1, 1.0};
  p.initial_density = [](double x, double y) {
    return 1.0 + 0.5 * std::cos(kPi * x) * std::cos(kPi * y);
  };
  p.time_step = 0.01;
  return p;
}

struct CertifiedRun {
  std::string name;
  Grid grid;
  SampledFields fields;
  RunResult result;
};

// ---------------------------------------------------------------------------

void criterion_1_convergence() {
  const std::vector<int> grids{9, 17, 33, 65, 129};
  const std::map<int, double> table_l2_o2{{9, 2.99e-1}, {17, 6.00e-2}, {33, 1.21e-2},
                                          {65, 2.59e-3}, {129, 5.85e-4}};
  const std::map<int, double> table_l2_o4{{9, 1.66e-2}, {17, 9.98e-4}, {33, 6.14e-5},
                                          {65, 3.81e-6}, {129, 2.37e-7}};
  const ProblemSpec p = catalog_problem("accuracy");

  bool pass = true;
  std::string detail;
  for (const SchemeOrder order : {SchemeOrder::Second, SchemeOrder::Fourth}) {
    const auto rows = convergence_study(p, order, grids, 1.0);
    const double target = order == SchemeOrder::Second ? 2.0 : 4.0;
    const double last_order = rows.back().linf_order;
    if (std::abs(last_order - target) > 0.3) pass = false;
    const auto& table = order == SchemeOrder::Second ? table_l2_o2 : table_l2_o4;
    double worst_ratio = 1.0;
    for (const auto& r : rows) {
      const double ratio = r.l2_error / table.at(r.n);
      worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
      if (ratio > 2.0 || ratio < 0.5) pass = false;
    }
    detail += "order " + std::to_string(order_value(order)) +
              ": last linf order " + fmt(last_order) + ", worst l2 ratio vs reference " +
              fmt(worst_ratio) + "; ";
  }
  criterion(1, "refinement study reproduces the reference accuracy table", pass, detail);
}

void criterion_2_mass() {
  bool pass = true;
  std::string detail;
  for (const std::string& name : catalog_names()) {
    for (const SchemeOrder order : {SchemeOrder::Second, SchemeOrder::Fourth}) {
      ProblemSpec p = catalog_problem(name);
      const int cells = order == SchemeOrder::Second ? 32 : 16;
      const Grid g = build_grid(p.bounds, cells, order, 2);
      if (name == "accuracy") p.time_step = g.h;  // the study's dt = dx rule
      RunOptions opts;
      opts.stop.max_steps = name == "accuracy" ? 20 : 120;
      const RunResult res = run(p, g, opts);
      const double mass0 = std::abs(res.trace.rows.front().mass);
      double worst = 0.0;
      for (size_t k = 1; k < res.trace.rows.size(); ++k)
        worst = std::max(worst, std::abs(res.trace.rows[k].mass -
                                         res.trace.rows[k - 1].mass) / mass0);
      if (worst > 1e-11) pass = false;
      detail += name + "/o" + std::to_string(order_value(order)) + " " + fmt(worst) + "; ";
    }
  }
  criterion(2, "per-step mass drift <= 1e-11 relative on every catalog run", pass, detail);
}

std::vector<CertifiedRun> certified_runs;

void criterion_3_4_certified_runs() {
  // (a) second-order smile at the reference resolution
  {
    CertifiedRun cr;
    cr.name = "smile/o2/129x129";
    const ProblemSpec p = catalog_problem("smile");
    cr.grid = build_grid(p.bounds, 128, SchemeOrder::Second, 2);
    cr.fields = sample(p, cr.grid);
    const SchemeOperator op = assemble(cr.grid, cr.fields, p.diffusion, 0.01);
    const MonotonicityReport rep = certify(op, cr.fields);
    if (rep.verdict != Verdict::CertifiedMonotone) {
      criterion(3, "positivity under certification", false,
                cr.name + " failed to certify");
      criterion(4, "energy dissipation", false, "no certified run");
      return;
    }
    RunOptions opts;
    opts.stop.max_steps = 520;
    opts.entropy = PhiEntropy::Kl;
    cr.result = run(cr.grid, cr.fields, p.diffusion, 0.01, opts);
    certified_runs.push_back(std::move(cr));
  }
  // (b) fourth-order mild-measure instance
  {
    CertifiedRun cr;
    cr.name = "mild/o4/65x65";
    const ProblemSpec p = mild_problem();
    cr.grid = build_grid(p.bounds, 32, SchemeOrder::Fourth, 2);
    cr.fields = sample(p, cr.grid);
    const SchemeOperator op = assemble(cr.grid, cr.fields, p.diffusion, p.time_step);
    const MonotonicityReport rep = certify(op, cr.fields);
    if (rep.verdict != Verdict::CertifiedMonotone) {
      criterion(3, "positivity under certification", false, cr.name + " failed to certify");
      criterion(4, "energy dissipation", false, "no certified fourth-order run");
      return;
    }
    RunOptions opts;
    opts.stop.max_steps = 520;
    opts.entropy = PhiEntropy::Kl;
    cr.result = run(cr.grid, cr.fields, p.diffusion, p.time_step, opts);
    certified_runs.push_back(std::move(cr));
  }

  // criterion 3: positivity on every certified run
  {
    bool pass = true;
    std::string detail;
    for (const auto& cr : certified_runs) {
      const double floor = -1e-12 * cr.fields.rho0.maxCoeff();
      double worst = cr.result.trace.rows.front().min_rho;
      for (const auto& r : cr.result.trace.rows) worst = std::min(worst, r.min_rho);
      if (worst < floor) pass = false;
      detail += cr.name + " min rho " + fmt(worst) + "; ";
    }
    criterion(3, "certified runs stay positive to 1e-12 of the initial peak", pass, detail);
  }

  // criterion 4: chi2 and kl nonincreasing across >= 500 steps
  {
    bool pass = true;
    std::string detail;
    for (const auto& cr : certified_runs) {
      const auto& rows = cr.result.trace.rows;
      if (rows.size() < 501) pass = false;
      const double chi_slack = 1e-11 * rows.front().chi2;
      const double kl_slack = 1e-11 * rows.front().entropy;
      double worst_chi = 0.0, worst_kl = 0.0;
      for (size_t k = 1; k < rows.size(); ++k) {
        worst_chi = std::max(worst_chi, rows[k].chi2 - rows[k - 1].chi2);
        worst_kl = std::max(worst_kl, rows[k].entropy - rows[k - 1].entropy);
      }
      if (worst_chi > chi_slack || worst_kl > kl_slack) pass = false;
      detail += cr.name + " worst increments " + fmt(worst_chi) + "/" + fmt(worst_kl) + "; ";
    }
    criterion(4, "chi2 and kl entropies nonincreasing over 500+ certified steps", pass,
              detail);
  }

}

void criterion_8_decay() {
  // strict chi2 decay of the certified smile run with a geometric tail fit
  if (certified_runs.empty()) {
    criterion(8, "exponential decay", false, "no certified smile run available");
    return;
  }
  const auto& cr = certified_runs.front();
  const auto& rows = cr.result.trace.rows;
  bool strict = true;
  for (size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].chi2 < rows[k - 1].chi2)) strict = false;
  const auto fit = fit_decay_rate(cr.result.trace, 100);
  const bool fit_ok = fit && !fit->exact && fit->factor > 0.0 && fit->factor < 1.0;
  criterion(8, "smile chi2 trace strictly decreasing with geometric tail factor in (0,1)",
            strict && fit_ok, fit ? "tail factor " + fmt(fit->factor) : "no fit");
}

void criterion_5_soundness() {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int certified = 0, attempts = 0, closed_form = 0, buckets[2][2] = {{0, 0}, {0, 0}};
  double worst = 0.0;
  bool sound = true, closed_implies_cert = true;
  std::string worst_at;

  while (certified < 56 && attempts < 400) {
    ++attempts;
    const int dim = attempts % 2 == 0 ? 2 : 1;
    const SchemeOrder order = (attempts / 2) % 2 == 0 ? SchemeOrder::Second
                                                      : SchemeOrder::Fourth;
    // every fourth draw is conservative enough to satisfy the closed-form
    // inequalities, not just the matrix-level certificate
    const bool conservative = attempts % 4 == 0;
    const double width = 0.5 + 1.5 * unif(rng);
    int cells;
    if (dim == 1)
      cells = order == SchemeOrder::Second ? 8 + static_cast<int>(unif(rng) * 56)
                                           : 4 + static_cast<int>(unif(rng) * 28);
    else
      cells = order == SchemeOrder::Second ? 4 + static_cast<int>(unif(rng) * 12)
                                           : 2 + static_cast<int>(unif(rng) * 6);
    const Grid g = build_grid({AxisBounds{0.0, width}, AxisBounds{0.0, width}},
                              cells, order, dim);
    const double D = 0.5 + 1.5 * unif(rng);

    SampledFields f;
    const int np = g.points();
    f.M.resize(np);
    f.u.resize(np);
    f.v = Vector::Zero(np);
    const double base = 0.6 + unif(rng);
    const double am = (conservative ? 0.01 : 0.4) * base * unif(rng);
    const double kx = 1.0 + 2.0 * unif(rng), ph = 6.28 * unif(rng);
    const double cap =
        (conservative ? 0.02 : 0.2) * D * (base - am) / g.h * unif(rng);
    for (int q = 0; q < np; ++q) {
      const double x = g.x(q), y = g.y(q);
      f.M[q] = base + am * std::sin(kx * x + ph) * (dim == 2 ? std::cos(kx * y) : 1.0);
      f.u[q] = dim == 1 ? cap : cap * std::sin(kx * y + 0.3);
      if (dim == 2) f.v[q] = cap * std::cos(kx * x);
    }
    if (dim == 1) {
      f.u[0] = 0.0;
      f.u[g.n - 1] = 0.0;
    } else {
      for (int j = 0; j < g.n; ++j) {
        f.u[g.index(0, j)] = 0.0;
        f.u[g.index(g.n - 1, j)] = 0.0;
        f.v[g.index(j, 0)] = 0.0;
        f.v[g.index(j, g.n - 1)] = 0.0;
      }
    }
    f.rho0 = f.M;
    f.f = Vector::Zero(np);
    f.g0 = Vector::Ones(np);

    double dtf;
    if (conservative)
      dtf = order == SchemeOrder::Fourth ? (55.0 + 60.0 * unif(rng))
                                         : (1.0 + 10.0 * unif(rng));
    else
      dtf = order == SchemeOrder::Fourth ? (1.0 + 99.0 * unif(rng))
                                         : (0.1 + 10.0 * unif(rng));
    const double dt = dtf * g.h * g.h / D;
    const SchemeOperator op = assemble(g, f, D, dt);
    const MonotonicityReport rep = certify(op, f);
    if (rep.conditions_pass()) {
      ++closed_form;
      // the closed-form inequalities imply the matrix-level certificate
      if (rep.verdict != Verdict::CertifiedMonotone) closed_implies_cert = false;
    }
    if (rep.verdict != Verdict::CertifiedMonotone) continue;
    ++certified;
    ++buckets[order == SchemeOrder::Fourth][dim - 1];
    const OracleResult res = oracle_inverse_nonneg(op.A, 1e-12);
    const double rel = res.min_entry / res.inverse_scale;
    if (rel < worst) {
      worst = rel;
      worst_at = "order " + std::to_string(order_value(order)) + " dim " +
                 std::to_string(dim) + " n " + std::to_string(np);
    }
    if (!res.pass) sound = false;
  }
  const bool enough = certified >= 50 && closed_form >= 10 && buckets[0][0] > 0 &&
                      buckets[0][1] > 0 && buckets[1][0] > 0 && buckets[1][1] > 0;
  criterion(5, "dense-inverse oracle confirms every certified random instance",
            sound && enough && closed_implies_cert,
            std::to_string(certified) + " certified of " + std::to_string(attempts) +
                " drawn (o2/o4 x 1D/2D all covered, " + std::to_string(closed_form) +
                " also pass the closed-form bounds), worst relative inverse entry " +
                fmt(worst) + (worst_at.empty() ? "" : " at " + worst_at));
}

void criterion_6_small_dt_loss() {
  const Grid g = build_grid(AxisBounds{0.0, 1.0}, 4, SchemeOrder::Fourth);  // N = 9
  SampledFields f;
  f.M = Vector::Ones(g.points());
  f.u = Vector::Zero(g.points());
  f.v = Vector::Zero(g.points());
  f.rho0 = f.M;
  f.f = Vector::Zero(g.points());
  f.g0 = Vector::Ones(g.points());
  const double D = 1.0;
  const SchemeOperator op = assemble(g, f, D, g.h * g.h / (1000.0 * D));
  const OracleResult res = oracle_inverse_nonneg(op.A, 1e-12);
  criterion(6, "fourth-order monotonicity is lost at dt = h^2/(1000 D)",
            !res.pass && res.min_entry < 0.0, "min inverse entry " + fmt(res.min_entry));
}

void criterion_7_steady_state() {
  bool pass = true;
  std::string detail;
  for (const SchemeOrder order : {SchemeOrder::Second, SchemeOrder::Fourth}) {
    const ProblemSpec p = catalog_problem("smile");
    const Grid g = build_grid(p.bounds, order == SchemeOrder::Second ? 32 : 16, order, 2);
    SampledFields f = sample(p, g);
    const double K = 2.0;
    f.rho0 = K * f.M;
    f.g0 = f.rho0.cwiseQuotient(f.M);
    RunOptions opts;
    opts.stop.max_steps = 100;
    SchemeOperator op = assemble(g, f, p.diffusion, p.time_step);
    State s;
    s.g = f.g0;
    s.rho = f.rho0;
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      auto [next, rep] = step(s, op, f, opts.solver);
      s = std::move(next);
      worst = std::max(worst, (s.g.array() - K).abs().maxCoeff() / K);
    }
    if (worst > 10.0 * opts.solver.tol) pass = false;
    detail += "o" + std::to_string(order_value(order)) + " relative deviation " +
              fmt(worst) + "; ";
  }
  criterion(7, "constant-ratio state preserved for 100 steps within 10x solver tolerance",
            pass, detail);
}

// criterion 9 helpers: hand-substituted wall rows for the 1D schemes and one
// hand-derived midline-x row of the 2D fourth-order scheme (see unit tests
// for the full derivations; this reruns the checks end to end).
bool ghost_rows_bit_exact() {
  bool ok = true;
  for (const SchemeOrder order : {SchemeOrder::Second, SchemeOrder::Fourth}) {
    const Grid g = build_grid(AxisBounds{-0.5, 1.75}, 6, order);
    SampledFields f;
    f.M.resize(g.n);
    f.u.resize(g.n);
    f.v = Vector::Zero(g.n);
    for (int i = 0; i < g.n; ++i) {
      f.M[i] = 1.4 + 0.4 * std::sin(2.1 * g.x(i));
      f.u[i] = 0.3 * std::cos(1.7 * g.x(i));
    }
    f.u[0] = 0.0;
    f.u[g.n - 1] = 0.0;
    f.rho0 = f.M;
    f.f = Vector::Zero(g.n);
    f.g0 = Vector::Ones(g.n);
    const double D = 0.9, dt = 0.021;
    const SchemeOperator op = assemble(g, f, D, dt);
    const double h = g.h;
    auto M = [&](int i) { return f.M[i]; };
    auto U = [&](int i) { return f.u[i]; };

    auto entry = [&](int r, int c) { return op.A.coeff(r, c); };
    if (order == SchemeOrder::Second) {
      const double inv2h = 1.0 / (2.0 * h), inv2h2 = 1.0 / (2.0 * h * h);
      const double a1 = -(U(1) * inv2h) + -(U(1) * inv2h);
      const double d1 = -((D * (M(1) + M(0))) * inv2h2) + -((D * (M(0) + M(1))) * inv2h2);
      ok &= entry(0, 1) == dt * (a1 + d1);
      ok &= entry(0, 0) ==
            M(0) + dt * ((0.0 + -(U(0) / h)) +
                         ((D * (M(1) + 2.0 * M(0) + M(1))) * inv2h2 + 0.0));
      const int e = g.n - 1;
      const double ae = U(e - 1) * inv2h + U(e - 1) * inv2h;
      const double de =
          -((D * (M(e - 1) + M(e))) * inv2h2) + -((D * (M(e) + M(e - 1))) * inv2h2);
      ok &= entry(e, e - 1) == dt * (ae + de);
    } else {
      const double inv2h = 1.0 / (2.0 * h), inv4h = 1.0 / (4.0 * h);
      const double inv8h2 = 1.0 / (8.0 * h * h);
      const double a2 = -((-U(2)) * inv4h) + U(2) * inv4h;
      const double d2 = (D * (3.0 * (M(2) + M(0)) - 4.0 * M(1))) * inv8h2 +
                        (D * (3.0 * (M(0) + M(2)) - 4.0 * M(1))) * inv8h2;
      ok &= entry(0, 2) == dt * (a2 + d2);
      const double a1 = (4.0 * -U(1)) * inv4h + -((4.0 * U(1)) * inv4h);
      const double d1 = -((D * (4.0 * M(2) + 12.0 * M(0))) * inv8h2) +
                        -((D * (4.0 * M(2) + 12.0 * M(0))) * inv8h2);
      ok &= entry(0, 1) == dt * (a1 + d1);
      ok &= entry(0, 0) ==
            M(0) + dt * ((0.0 + -((3.0 * U(0)) * inv2h)) +
                         ((D * (M(2) + 4.0 * M(1) + 18.0 * M(0) + 4.0 * M(1) + M(2))) *
                              inv8h2 +
                          0.0));
    }
  }
  return ok;
}

bool symmetry_row_exact() {
  const Grid g =
      build_grid({AxisBounds{-1.0, 1.0}, AxisBounds{-1.0, 1.0}}, 3, SchemeOrder::Fourth, 2);
  SampledFields f;
  const int np = g.points();
  f.M.resize(np);
  f.u.resize(np);
  f.v.resize(np);
  for (int p = 0; p < np; ++p) {
    f.M[p] = 1.8 + 0.6 * std::sin(g.x(p) + 0.4) * std::cos(g.y(p));
    f.u[p] = 0.25 * std::cos(g.x(p)) * std::sin(g.y(p) + 0.1);
    f.v[p] = 0.15 * std::sin(2.0 * g.x(p)) + 0.05 * std::cos(g.y(p));
  }
  f.rho0 = f.M;
  f.f = Vector::Zero(np);
  f.g0 = Vector::Ones(np);
  const double D = 1.2, dt = 0.03;
  const SchemeOperator op = assemble(g, f, D, dt);
  const int i = 3, j = 2;  // midline along x at a knot level: the derived case
  const double h = g.h;
  const double inv2h = 1.0 / (2.0 * h), inv4h = 1.0 / (4.0 * h);
  const double inv4h2 = 1.0 / (4.0 * h * h), inv8h2 = 1.0 / (8.0 * h * h);
  auto M = [&](int a, int b) { return f.M[g.index(a, b)]; };
  auto U = [&](int a, int b) { return f.u[g.index(a, b)]; };
  auto V = [&](int a, int b) { return f.v[g.index(a, b)]; };
  auto A = [&](int a, int b) { return op.A.coeff(g.index(i, j), g.index(a, b)); };

  bool ok = true;
  ok &= A(i - 1, j) ==
        dt * (U(i - 1, j) * inv2h + -((D * (3.0 * M(i - 1, j) + M(i + 1, j))) * inv4h2));
  ok &= A(i + 1, j) ==
        dt * (-(U(i + 1, j) * inv2h) + -((D * (M(i - 1, j) + 3.0 * M(i + 1, j))) * inv4h2));
  ok &= A(i, j - 2) == dt * (-(V(i, j - 2) * inv4h) +
                             (D * (3.0 * (M(i, j - 2) + M(i, j)) - 4.0 * M(i, j - 1))) *
                                 inv8h2);
  ok &= A(i, j - 1) == dt * ((4.0 * V(i, j - 1)) * inv4h +
                             -((D * (4.0 * M(i, j - 2) + 12.0 * M(i, j))) * inv8h2));
  ok &= A(i, j + 1) == dt * (-((4.0 * V(i, j + 1)) * inv4h) +
                             -((D * (4.0 * M(i, j + 2) + 12.0 * M(i, j))) * inv8h2));
  ok &= A(i, j + 2) == dt * (V(i, j + 2) * inv4h +
                             (D * (3.0 * (M(i, j) + M(i, j + 2)) - 4.0 * M(i, j + 1))) *
                                 inv8h2);
  const double diff_x = (4.0 * D * (M(i - 1, j) + M(i + 1, j))) * inv4h2;
  const double diff_y = (D * (M(i, j - 2) + 4.0 * M(i, j - 1) + 18.0 * M(i, j) +
                              4.0 * M(i, j + 1) + M(i, j + 2))) *
                        inv8h2;
  ok &= A(i, j) == M(i, j) + dt * (0.0 + (diff_x + diff_y));
  return ok;
}

void criterion_9_cross_checks() {
  const bool ghost = ghost_rows_bit_exact();
  const bool sym = symmetry_row_exact();
  criterion(9, "ghost-mapped wall rows and the symmetry-generated row are bit exact",
            ghost && sym,
            std::string("ghost rows ") + (ghost ? "ok" : "MISMATCH") + ", midline-x row " +
                (sym ? "ok" : "MISMATCH"));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_1_convergence();
  criterion_2_mass();
  criterion_3_4_certified_runs();
  criterion_5_soundness();
  criterion_6_small_dt_loss();
  criterion_7_steady_state();
  criterion_8_decay();
  criterion_9_cross_checks();
  std::printf("================\n%s (%d failure%s)\n",
              g_failures == 0 ? "ALL CRITERIA PASS" : "CRITERIA FAILED", g_failures,
              g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
