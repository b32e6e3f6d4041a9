#include "fpsolve/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fpsolve {

namespace {

constexpr double kPi = 3.14159265358979323846;

double eval(const Sampler& s, double x, double y) { return s(x, y); }

// Parity-matched first-derivative stencils on ghost-extended samples.
// 0-based even axis index = knot level = wide stencil for order 4.
double axis_derivative(const std::function<double(int)>& q, int a, SchemeOrder order, double h) {
  if (order == SchemeOrder::Fourth && a % 2 == 0)
    return (q(a - 2) - 4.0 * q(a - 1) + 4.0 * q(a + 1) - q(a + 2)) / (4.0 * h);
  return (q(a + 1) - q(a - 1)) / (2.0 * h);
}

}  // namespace

std::pair<Vector, Vector> velocity_from_stream(const Sampler& psi, const Grid& grid) {
  if (grid.dimension != 2) throw ConfigError("velocity_from_stream: 2D grids only");
  const int n = grid.n;
  Vector u(grid.points()), v(grid.points());
  auto coord = [&](int t) { return grid.bounds[0].lo + t * grid.h; };  // axes share h
  auto coord_y = [&](int t) { return grid.bounds[1].lo + t * grid.h; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      auto psi_row = [&](int t) { return eval(psi, coord(t), coord_y(j)); };
      auto psi_col = [&](int t) { return eval(psi, coord(i), coord_y(t)); };
      const int p = grid.index(i, j);
      u[p] = -axis_derivative(psi_col, j, grid.order, grid.h);
      v[p] = axis_derivative(psi_row, i, grid.order, grid.h);
    }
  }
  // No-flux wall condition: normal component vanishes on the boundary.
  for (int j = 0; j < n; ++j) {
    u[grid.index(0, j)] = 0.0;
    u[grid.index(n - 1, j)] = 0.0;
    v[grid.index(j, 0)] = 0.0;
    v[grid.index(j, n - 1)] = 0.0;
  }
  return {std::move(u), std::move(v)};
}

Vector discrete_divergence(const Vector& u, const Vector& v, const Grid& grid) {
  if (grid.dimension != 2) throw ConfigError("discrete_divergence: 2D grids only");
  const int n = grid.n;
  Vector div(grid.points());
  auto mirrored = [&](const Vector& q, int i, int j, bool flip_i, bool flip_j) {
    double s = 1.0;
    if (i < 0 || i >= n) {
      i = i < 0 ? -i : 2 * (n - 1) - i;
      if (flip_i) s = -s;
    }
    if (j < 0 || j >= n) {
      j = j < 0 ? -j : 2 * (n - 1) - j;
      if (flip_j) s = -s;
    }
    return s * q[grid.index(i, j)];
  };
  auto ux = [&](int i, int j) { return mirrored(u, i, j, true, false); };
  auto vy = [&](int i, int j) { return mirrored(v, i, j, false, true); };
  const double h = grid.h;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double dx, dy;
      if (grid.order == SchemeOrder::Fourth && i % 2 == 0)
        dx = (-ux(i - 2, j) + 4.0 * ux(i - 1, j) - 4.0 * ux(i + 1, j) + ux(i + 2, j)) / (4.0 * h);
      else
        dx = (ux(i - 1, j) - ux(i + 1, j)) / (2.0 * h);
      if (grid.order == SchemeOrder::Fourth && j % 2 == 0)
        dy = (-vy(i, j - 2) + 4.0 * vy(i, j - 1) - 4.0 * vy(i, j + 1) + vy(i, j + 2)) / (4.0 * h);
      else
        dy = (vy(i, j - 1) - vy(i, j + 1)) / (2.0 * h);
      div[grid.index(i, j)] = dx + dy;
    }
  }
  return div;
}

double check_discrete_div_free(const SampledFields& fields, const Grid& grid) {
  return discrete_divergence(fields.u, fields.v, grid).cwiseAbs().maxCoeff();
}

SampledFields sample(const ProblemSpec& problem, const Grid& grid) {
  if (problem.dimension != grid.dimension)
    throw ConfigError("sample: problem/grid dimension mismatch");
  const int np = grid.points();
  SampledFields out;
  out.M.resize(np);
  out.u = Vector::Zero(np);
  out.v = Vector::Zero(np);
  out.rho0.resize(np);
  out.f = Vector::Zero(np);

  const bool model2 = problem.model == ModelKind::Model2;
  for (int p = 0; p < np; ++p) {
    const double x = grid.x(p), y = grid.y(p);
    out.M[p] = model2 ? 1.0 : eval(problem.measure, x, y);
    out.rho0[p] = eval(problem.initial_density, x, y);
    if (problem.source) out.f[p] = eval(problem.source, x, y);
    if (out.M[p] < problem.measure_floor)
      throw PositivityError("invariant measure below floor at point " + std::to_string(p) +
                            " (x=" + std::to_string(x) + ", y=" + std::to_string(y) +
                            "): M=" + std::to_string(out.M[p]));
  }

  if (const auto* direct = std::get_if<DirectVelocity>(&problem.velocity)) {
    for (int p = 0; p < np; ++p) {
      const double x = grid.x(p), y = grid.y(p);
      const double uu = direct->u ? eval(direct->u, x, y) : 0.0;
      const double vv = (grid.dimension == 2 && direct->v) ? eval(direct->v, x, y) : 0.0;
      out.u[p] = model2 ? -uu : uu;
      out.v[p] = model2 ? -vv : vv;
    }
  } else {
    const auto& flow = std::get<CellularFlow>(problem.velocity);
    if (grid.dimension != 2) throw ConfigError("sample: stream-function velocity needs 2D");
    Sampler psi = [A = flow.amplitude, k = flow.wave_number](double x, double y) {
      return A * std::sin(k * kPi * x) * std::sin(k * kPi * y);
    };
    auto uv = velocity_from_stream(psi, grid);
    out.u = std::move(uv.first);
    out.v = std::move(uv.second);
  }

  if (!model2) {
    // Model 1 walls carry no normal flow.
    if (grid.dimension == 1) {
      out.u[0] = 0.0;
      out.u[grid.n - 1] = 0.0;
    } else {
      for (int j = 0; j < grid.n; ++j) {
        out.u[grid.index(0, j)] = 0.0;
        out.u[grid.index(grid.n - 1, j)] = 0.0;
        out.v[grid.index(j, 0)] = 0.0;
        out.v[grid.index(j, grid.n - 1)] = 0.0;
      }
    }
  }

  if (!model2 && problem.measure_dx) {
    Vector mx(np), my(np);
    for (int p = 0; p < np; ++p) {
      mx[p] = eval(*problem.measure_dx, grid.x(p), grid.y(p));
      my[p] = problem.measure_dy ? eval(*problem.measure_dy, grid.x(p), grid.y(p)) : 0.0;
    }
    out.M_dx = std::move(mx);
    out.M_dy = std::move(my);
  }

  out.g0 = out.rho0.cwiseQuotient(out.M);
  return out;
}

namespace {

ProblemSpec accuracy_problem() {
  ProblemSpec p;
  p.name = "accuracy";
  p.dimension = 2;
  p.bounds = {AxisBounds{0.0, kPi}, AxisBounds{0.0, kPi}};
  p.diffusion = 1.0;
  p.measure = [](double x, double y) { return 2.0 + std::sin(x) * std::sin(y); };
  p.measure_dx = [](double x, double y) { return std::cos(x) * std::sin(y); };
  p.measure_dy = [](double x, double y) { return std::sin(x) * std::cos(y); };
  p.velocity = DirectVelocity{
      [](double x, double y) { return std::sin(x) * std::cos(y); },
      [](double x, double y) { return std::cos(x) * std::sin(y); }};
  p.exact_density = [](double x, double y) {
    return (3.0 * std::cos(x) * std::cos(y) + 3.0) * (2.0 + std::sin(x) * std::sin(y));
  };
  p.initial_density = *p.exact_density;
  // Steady residual of the flux-form operator at rho* (so rho* solves the
  // discretized equation): f = -div(M grad(rho*/M)) - div(u rho*/M).
  p.source = [](double x, double y) {
    const double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
    return 12.0 * sx * cx * sy * cy + 6.0 * cx * cy - 6.0 * cx * cx * cy * cy +
           3.0 * sx * sx * cy * cy + 3.0 * cx * cx * sy * sy;
  };
  p.final_time = 1.0;
  p.time_step = 0.05;
  return p;
}

ProblemSpec smile_problem() {
  ProblemSpec p;
  p.name = "smile";
  p.dimension = 2;
  p.bounds = {AxisBounds{-4.5, 4.5}, AxisBounds{-4.5, 4.5}};
  p.diffusion = 1.0;
  p.measure = [](double x, double y) {
    const double q1 = (x - 1.2) * (x - 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
    const double q2 = (x + 1.2) * (x + 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
    const double q3 = x * x + y * y - 2.0;
    return std::exp(-20.0 * q1 * q1 - 10.0 * (y - 2.0) * (y - 2.0)) +
           std::exp(-20.0 * q2 * q2 - 10.0 * (y - 2.0) * (y - 2.0)) +
           std::exp(-20.0 * q3 * q3 - 10.0 * (y + 1.0) * (y + 1.0)) + 0.1;
  };
  p.measure_dx = [](double x, double y) {
    const double q1 = (x - 1.2) * (x - 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
    const double q2 = (x + 1.2) * (x + 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
    const double q3 = x * x + y * y - 2.0;
    const double t1 = std::exp(-20.0 * q1 * q1 - 10.0 * (y - 2.0) * (y - 2.0));
    const double t2 = std::exp(-20.0 * q2 * q2 - 10.0 * (y - 2.0) * (y - 2.0));
    const double t3 = std::exp(-20.0 * q3 * q3 - 10.0 * (y + 1.0) * (y + 1.0));
    return -80.0 * t1 * q1 * (x - 1.2) - 80.0 * t2 * q2 * (x + 1.2) - 80.0 * t3 * q3 * x;
  };
  p.measure_dy = [](double x, double y) {
    const double q1 = (x - 1.2) * (x - 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
    const double q2 = (x + 1.2) * (x + 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
    const double q3 = x * x + y * y - 2.0;
    const double t1 = std::exp(-20.0 * q1 * q1 - 10.0 * (y - 2.0) * (y - 2.0));
    const double t2 = std::exp(-20.0 * q2 * q2 - 10.0 * (y - 2.0) * (y - 2.0));
    const double t3 = std::exp(-20.0 * q3 * q3 - 10.0 * (y + 1.0) * (y + 1.0));
    return t1 * (-80.0 * q1 * (y - 1.2) - 20.0 * (y - 2.0)) +
           t2 * (-80.0 * q2 * (y - 1.2) - 20.0 * (y - 2.0)) +
           t3 * (-80.0 * q3 * y - 20.0 * (y + 1.0));
  };
  // wave_number 2 keeps the analytic normal flow zero on this domain.
  p.velocity = CellularFlow{0.2, 2.0};
  p.initial_density = [](double x, double y) {
    return std::exp(-16.0 * (x + 3.0) * (x + 3.0) - 4.0 * y * y) +
           std::exp(-16.0 * (x - 3.0) * (x - 3.0) - 4.0 * y * y) +
           std::exp(-4.0 * x * x - 16.0 * (y + 3.0) * (y + 3.0)) +
           std::exp(-4.0 * x * x - 16.0 * (y - 3.0) * (y - 3.0)) + 0.1;
  };
  p.final_time = 1.0;
  p.time_step = 0.01;
  return p;
}

ProblemSpec cross_problem() {
  ProblemSpec p;
  p.name = "cross";
  p.dimension = 2;
  p.bounds = {AxisBounds{-3.0, 3.0}, AxisBounds{-3.0, 3.0}};
  p.diffusion = 0.5;
  p.measure = [](double x, double y) {
    return std::exp(-(x + 3.0) * (x + 3.0) - y * y / 4.0) +
           std::exp(-(x - 3.0) * (x - 3.0) - y * y / 4.0) +
           0.5 * std::exp(-4.0 * x * x - 16.0 * (y + 1.0) * (y + 1.0)) +
           0.5 * std::exp(-4.0 * x * x - 16.0 * (y - 1.0) * (y - 1.0)) + 0.1;
  };
  p.measure_dx = [](double x, double y) {
    const double t1 = std::exp(-(x + 3.0) * (x + 3.0) - y * y / 4.0);
    const double t2 = std::exp(-(x - 3.0) * (x - 3.0) - y * y / 4.0);
    const double t3 = 0.5 * std::exp(-4.0 * x * x - 16.0 * (y + 1.0) * (y + 1.0));
    const double t4 = 0.5 * std::exp(-4.0 * x * x - 16.0 * (y - 1.0) * (y - 1.0));
    return -2.0 * (x + 3.0) * t1 - 2.0 * (x - 3.0) * t2 - 8.0 * x * t3 - 8.0 * x * t4;
  };
  p.measure_dy = [](double x, double y) {
    const double t1 = std::exp(-(x + 3.0) * (x + 3.0) - y * y / 4.0);
    const double t2 = std::exp(-(x - 3.0) * (x - 3.0) - y * y / 4.0);
    const double t3 = 0.5 * std::exp(-4.0 * x * x - 16.0 * (y + 1.0) * (y + 1.0));
    const double t4 = 0.5 * std::exp(-4.0 * x * x - 16.0 * (y - 1.0) * (y - 1.0));
    return -0.5 * y * t1 - 0.5 * y * t2 - 32.0 * (y + 1.0) * t3 - 32.0 * (y - 1.0) * t4;
  };
  p.velocity = CellularFlow{0.2, 1.0};
  p.initial_density = [](double x, double y) {
    return 0.5 * std::exp(-16.0 * (x + 1.0) * (x + 1.0) - 4.0 * y * y) +
           0.5 * std::exp(-16.0 * (x - 1.0) * (x - 1.0) - 4.0 * y * y) +
           std::exp(-x * x / 4.0 - (y + 3.0) * (y + 3.0)) +
           std::exp(-x * x / 4.0 - (y - 3.0) * (y - 3.0)) + 0.1;
  };
  p.final_time = 1.0;
  p.time_step = 0.02;
  return p;
}

}  // namespace

ProblemSpec catalog_problem(const std::string& name) {
  if (name == "accuracy") return accuracy_problem();
  if (name == "smile") return smile_problem();
  if (name == "cross") return cross_problem();
  throw ConfigError("unknown catalog problem: " + name);
}

std::vector<std::string> catalog_names() { return {"accuracy", "smile", "cross"}; }

SampledFields sample_table(const std::string& csv_path, const Grid& grid, ModelKind model,
                           double measure_floor) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open table: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty table: " + csv_path);
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "x,y,M,u,v,rho0")
    throw ConfigError("table header must be `x,y,M,u,v,rho0`, got `" + line + "`");

  const int np = grid.points();
  SampledFields out;
  out.M.resize(np);
  out.u.resize(np);
  out.v.resize(np);
  out.rho0.resize(np);
  out.f = Vector::Zero(np);

  int row = 0;
  while (std::getline(in, line)) {
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= np) throw ConfigError("table has more rows than grid points (" +
                                     std::to_string(np) + " expected)");
    std::istringstream ss(line);
    double val[6];
    char comma;
    for (int c = 0; c < 6; ++c) {
      if (!(ss >> val[c])) throw ConfigError("bad table row " + std::to_string(row + 2));
      if (c < 5 && !(ss >> comma)) throw ConfigError("bad table row " + std::to_string(row + 2));
    }
    const double tol = 1e-6 * std::max(1.0, std::abs(grid.bounds[0].width()));
    if (std::abs(val[0] - grid.x(row)) > tol || std::abs(val[1] - grid.y(row)) > tol)
      throw ConfigError("table row " + std::to_string(row + 2) +
                        " coordinates do not match the grid (flattened order, x fastest)");
    out.M[row] = model == ModelKind::Model2 ? 1.0 : val[2];
    out.u[row] = model == ModelKind::Model2 ? -val[3] : val[3];
    out.v[row] = model == ModelKind::Model2 ? -val[4] : val[4];
    out.rho0[row] = val[5];
    ++row;
  }
  if (row != np)
    throw ConfigError("table has " + std::to_string(row) + " rows, grid needs " +
                      std::to_string(np));
  for (int p = 0; p < np; ++p)
    if (out.M[p] < measure_floor)
      throw PositivityError("table measure below floor at row " + std::to_string(p + 2));

  if (model == ModelKind::Model1) {
    if (grid.dimension == 1) {
      out.u[0] = 0.0;
      out.u[grid.n - 1] = 0.0;
    } else {
      for (int j = 0; j < grid.n; ++j) {
        out.u[grid.index(0, j)] = 0.0;
        out.u[grid.index(grid.n - 1, j)] = 0.0;
        out.v[grid.index(j, 0)] = 0.0;
        out.v[grid.index(j, grid.n - 1)] = 0.0;
      }
    }
  }
  out.g0 = out.rho0.cwiseQuotient(out.M);
  return out;
}

}  // namespace fpsolve
