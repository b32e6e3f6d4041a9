#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "fpsolve/grid.hpp"
#include "fpsolve/types.hpp"

namespace fpsolve {

// Pointwise field sampler; 1D problems are called with y = 0.
using Sampler = std::function<double(double, double)>;

struct DirectVelocity {
  Sampler u;
  Sampler v;  // unused in 1D
};

// psi(x, y) = amplitude * sin(wave_number*pi*x) * sin(wave_number*pi*y)
struct CellularFlow {
  double amplitude = 0.2;
  double wave_number = 1.0;
};

using VelocitySpec = std::variant<DirectVelocity, CellularFlow>;

struct ProblemSpec {
  std::string name;
  ModelKind model = ModelKind::Model1;
  int dimension = 2;
  std::array<AxisBounds, 2> bounds{};
  double diffusion = 1.0;
  Sampler measure;  // Model 1 invariant measure
  std::optional<Sampler> measure_dx, measure_dy;
  VelocitySpec velocity;  // Model 1 velocity, or the drift b for Model 2
  Sampler initial_density;
  Sampler source;  // empty = homogeneous
  std::optional<Sampler> exact_density;  // manufactured solutions only
  double final_time = 1.0;
  double time_step = 0.01;
  double measure_floor = 1e-10;
};

struct SampledFields {
  Vector M, u, v, rho0, f, g0;
  std::optional<Vector> M_dx, M_dy;  // analytic measure gradient, when known
  int points() const { return static_cast<int>(M.size()); }
};

// Pointwise evaluation of every sampler. Model 1 velocities get their normal
// component zeroed on the matching boundary; Model 2 stores M = 1 and the
// negated drift verbatim. Throws PositivityError if M drops below the floor.
SampledFields sample(const ProblemSpec& problem, const Grid& grid);

// Parity-matched stream-function differencing; the result satisfies the
// scheme's own discrete divergence constraint to round-off away from the
// zeroed boundary values. psi must be evaluable two layers outside the domain.
std::pair<Vector, Vector> velocity_from_stream(const Sampler& psi, const Grid& grid);

// Per-point discrete divergence stencil values (ghost-reflected at the
// boundary); check_discrete_div_free reports the max magnitude.
Vector discrete_divergence(const Vector& u, const Vector& v, const Grid& grid);
double check_discrete_div_free(const SampledFields& fields, const Grid& grid);

// Built-in experiment catalog: "accuracy", "smile", "cross".
ProblemSpec catalog_problem(const std::string& name);
std::vector<std::string> catalog_names();

// CSV-tabulated fields, header `x,y,M,u,v,rho0`, one row per grid point in
// flattened order. For Model 2 the M column is ignored and (u,v) is taken as
// the drift b.
SampledFields sample_table(const std::string& csv_path, const Grid& grid,
                           ModelKind model = ModelKind::Model1, double measure_floor = 1e-10);

}  // namespace fpsolve
