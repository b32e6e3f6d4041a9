#pragma once

#include <string>

#include "fpsolve/grid.hpp"
#include "fpsolve/problem.hpp"

namespace fpsolve {

struct GhostRef {
  int index;
  double vel_sign;
};

// Mirror an out-of-range axis index across the boundary node (0-based;
// at most two layers out). Measure and density values map with sign +1,
// the velocity component normal to the reflecting wall with sign -1.
GhostRef ghost_map(int n_axis, int idx);

// Implicit-Euler system kept in two algebraically linked forms: A is the
// finite-difference form actually solved, A_diff/A_adv are the lumped
// variational parts, row i of (W*Mdiag + dt*(A_diff + A_adv)) equals
// w_i times row i of A.
struct SchemeOperator {
  SparseMat A;
  SparseMat A_diff;
  SparseMat A_adv;
  Vector w;
  Vector Mdiag;
  double dt = 0.0;
  double diffusion = 0.0;
  SchemeOrder order = SchemeOrder::Second;
  Grid grid;
  int points() const { return static_cast<int>(Mdiag.size()); }
};

SchemeOperator assemble(const Grid& grid, const SampledFields& fields, double diffusion,
                        double dt);

// rhs_i = M_i g_i + dt f_i (the finite-difference form; quadrature weights
// cancel against the row scaling of A).
Vector build_rhs(const SampledFields& fields, const Vector& g_n, double dt);

// Coordinate-format dump, one `row col value` line per entry (1-based).
void dump_matrix(const SparseMat& A, const std::string& path);

namespace detail {

// One-axis slice of the sampled fields at a fixed transverse index, with
// ghost mirroring. u() carries the reflection sign of the normal velocity.
struct AxisView {
  const Grid* grid;
  const Vector* M;
  const Vector* vel;  // velocity component along this axis
  int axis;           // 0 = x, 1 = y
  int other;          // transverse index (ignored in 1D)

  int flat(int t) const {
    return axis == 0 ? grid->index(t, grid->dimension == 2 ? other : 0)
                     : grid->index(other, t);
  }
  double m(int t) const { return (*M)[flat(ghost_map(grid->n, t).index)]; }
  double u(int t) const {
    const GhostRef g = ghost_map(grid->n, t);
    return g.vel_sign * (*vel)[flat(g.index)];
  }
  int col(int t) const { return flat(ghost_map(grid->n, t).index); }
};

// Per-axis stencil row at axis index a, before ghost folding; adv/diff
// coefficients exclude the dt factor. Order 4 uses the wide (knot) row at
// even 0-based a and the narrow (midline) row at odd a.
struct AxisEntry {
  int off;      // -2..2
  double adv;
  double diff;
};

struct AxisStencil {
  int count = 0;
  AxisEntry e[5];
  double boundary_adv_diag = 0.0;  // wall advection term, lands on the diagonal
};

AxisStencil axis_stencil(const AxisView& v, int a, SchemeOrder order, double diffusion,
                         double h);

}  // namespace detail

}  // namespace fpsolve
