#include "fpsolve/assembly.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

namespace fpsolve {

GhostRef ghost_map(int n_axis, int idx) {
  if (idx >= 0 && idx < n_axis) return {idx, 1.0};
  if (idx < 0) {
    if (idx < -2) throw std::logic_error("ghost_map: offset beyond two layers");
    return {-idx, -1.0};
  }
  if (idx > n_axis + 1) throw std::logic_error("ghost_map: offset beyond two layers");
  return {2 * (n_axis - 1) - idx, -1.0};
}

namespace detail {

AxisStencil axis_stencil(const AxisView& v, int a, SchemeOrder order, double D, double h) {
  AxisStencil s;
  const int n = v.grid->n;
  if (order == SchemeOrder::Second) {
    const double inv2h = 1.0 / (2.0 * h);
    const double inv2h2 = 1.0 / (2.0 * h * h);
    s.count = 3;
    s.e[0] = {-1, v.u(a - 1) * inv2h, -((D * (v.m(a - 1) + v.m(a))) * inv2h2)};
    s.e[1] = {0, 0.0, (D * (v.m(a - 1) + 2.0 * v.m(a) + v.m(a + 1))) * inv2h2};
    s.e[2] = {+1, -(v.u(a + 1) * inv2h), -((D * (v.m(a) + v.m(a + 1))) * inv2h2)};
    if (a == 0) s.boundary_adv_diag = -(v.u(0) / h);
    if (a == n - 1) s.boundary_adv_diag = v.u(n - 1) / h;
    return s;
  }
  if (a % 2 == 0) {  // knot row (wide stencil)
    const double inv4h = 1.0 / (4.0 * h);
    const double inv8h2 = 1.0 / (8.0 * h * h);
    s.count = 5;
    // The two-away couplings are symmetric in their outer measure samples;
    // keeping that form makes boundary folds exact doublings.
    s.e[0] = {-2, -(v.u(a - 2) * inv4h),
              (D * (3.0 * (v.m(a - 2) + v.m(a)) - 4.0 * v.m(a - 1))) * inv8h2};
    s.e[1] = {-1, (4.0 * v.u(a - 1)) * inv4h,
              -((D * (4.0 * v.m(a - 2) + 12.0 * v.m(a))) * inv8h2)};
    s.e[2] = {0, 0.0,
              (D * (v.m(a - 2) + 4.0 * v.m(a - 1) + 18.0 * v.m(a) + 4.0 * v.m(a + 1) +
                    v.m(a + 2))) *
                  inv8h2};
    s.e[3] = {+1, -((4.0 * v.u(a + 1)) * inv4h),
              -((D * (4.0 * v.m(a + 2) + 12.0 * v.m(a))) * inv8h2)};
    s.e[4] = {+2, v.u(a + 2) * inv4h,
              (D * (3.0 * (v.m(a) + v.m(a + 2)) - 4.0 * v.m(a + 1))) * inv8h2};
    const double inv2h = 1.0 / (2.0 * h);
    if (a == 0) s.boundary_adv_diag = -((3.0 * v.u(0)) * inv2h);
    if (a == n - 1) s.boundary_adv_diag = (3.0 * v.u(n - 1)) * inv2h;
    return s;
  }
  // midline row (narrow stencil); never adjacent to a ghost layer
  const double inv2h = 1.0 / (2.0 * h);
  const double inv4h2 = 1.0 / (4.0 * h * h);
  s.count = 3;
  s.e[0] = {-1, v.u(a - 1) * inv2h, -((D * (3.0 * v.m(a - 1) + v.m(a + 1))) * inv4h2)};
  s.e[1] = {0, 0.0, (4.0 * D * (v.m(a - 1) + v.m(a + 1))) * inv4h2};
  s.e[2] = {+1, -(v.u(a + 1) * inv2h), -((D * (v.m(a - 1) + 3.0 * v.m(a + 1))) * inv4h2)};
  return s;
}

namespace {

// Small per-row accumulator; folds ghost contributions in emission order.
struct RowBuilder {
  struct Slot {
    int col;
    double adv;
    double diff;
  };
  Slot s[16];
  int count = 0;
  void reset() { count = 0; }
  void add(int col, double adv, double diff) {
    for (int k = 0; k < count; ++k) {
      if (s[k].col == col) {
        s[k].adv += adv;
        s[k].diff += diff;
        return;
      }
    }
    s[count++] = {col, adv, diff};
  }
};

}  // namespace
}  // namespace detail

SchemeOperator assemble(const Grid& grid, const SampledFields& fields, double diffusion,
                        double dt) {
  const int np = grid.points();
  if (fields.points() != np) throw ConfigError("assemble: fields not sampled on this grid");
  if (!(dt > 0.0)) throw ConfigError("assemble: dt must be positive");
  if (diffusion < 0.0) throw ConfigError("assemble: negative diffusion");

  SchemeOperator op;
  op.dt = dt;
  op.diffusion = diffusion;
  op.order = grid.order;
  op.grid = grid;
  op.w = grid.weights;
  op.Mdiag = fields.M;

  std::vector<Triplet> ta, td, tv;
  ta.reserve(static_cast<size_t>(np) * 9);
  td.reserve(static_cast<size_t>(np) * 9);
  tv.reserve(static_cast<size_t>(np) * 9);

  detail::RowBuilder row;
  for (int p = 0; p < np; ++p) {
    row.reset();
    const int i = grid.ix(p), j = grid.iy(p);
    for (int axis = 0; axis < grid.dimension; ++axis) {
      const detail::AxisView view{&grid, &fields.M, axis == 0 ? &fields.u : &fields.v, axis,
                                  axis == 0 ? j : i};
      const int a = axis == 0 ? i : j;
      const detail::AxisStencil st =
          detail::axis_stencil(view, a, grid.order, diffusion, grid.h);
      for (int k = 0; k < st.count; ++k)
        row.add(view.col(a + st.e[k].off), st.e[k].adv, st.e[k].diff);
      if (st.boundary_adv_diag != 0.0) row.add(p, st.boundary_adv_diag, 0.0);
    }
    for (int k = 0; k < row.count; ++k) {
      const auto& slot = row.s[k];
      double a_entry = dt * (slot.adv + slot.diff);
      if (slot.col == p) a_entry = fields.M[p] + a_entry;
      ta.emplace_back(p, slot.col, a_entry);
      td.emplace_back(p, slot.col, grid.weights[p] * slot.diff);
      tv.emplace_back(p, slot.col, grid.weights[p] * slot.adv);
    }
  }

  op.A.resize(np, np);
  op.A.setFromTriplets(ta.begin(), ta.end());
  op.A.makeCompressed();
  op.A_diff.resize(np, np);
  op.A_diff.setFromTriplets(td.begin(), td.end());
  op.A_diff.makeCompressed();
  op.A_adv.resize(np, np);
  op.A_adv.setFromTriplets(tv.begin(), tv.end());
  op.A_adv.makeCompressed();
  return op;
}

Vector build_rhs(const SampledFields& fields, const Vector& g_n, double dt) {
  if (g_n.size() != fields.M.size()) throw ConfigError("build_rhs: size mismatch");
  return fields.M.cwiseProduct(g_n) + dt * fields.f;
}

void dump_matrix(const SparseMat& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open matrix dump file: " + path);
  char buf[80];
  for (int r = 0; r < A.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(A, r); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                    static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
  }
}

}  // namespace fpsolve
