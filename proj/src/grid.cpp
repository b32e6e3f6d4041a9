#include "fpsolve/grid.hpp"

#include <cmath>

namespace fpsolve {

static void validate(const std::array<AxisBounds, 2>& bounds, int cells, SchemeOrder order,
                     int dimension) {
  if (dimension != 1 && dimension != 2)
    throw ConfigError("grid: dimension must be 1 or 2, got " + std::to_string(dimension));
  if (order != SchemeOrder::Second && order != SchemeOrder::Fourth)
    throw ConfigError("grid: order must be 2 or 4");
  if (cells < 1) throw ConfigError("grid: cells_per_axis must be >= 1");
  for (int a = 0; a < dimension; ++a) {
    if (!(bounds[a].width() > 0.0))
      throw ConfigError("grid: degenerate domain on axis " + std::to_string(a));
  }
  if (dimension == 2) {
    const double wx = bounds[0].width(), wy = bounds[1].width();
    if (std::abs(wx - wy) > 1e-12 * std::max(wx, wy))
      throw ConfigError("grid: axes must have equal extent (single spacing h)");
  }
}

std::vector<PointKind> classify_points(const Grid& g) {
  std::vector<PointKind> kind(g.points());
  if (g.order == SchemeOrder::Second) {
    for (int p = 0; p < g.points(); ++p)
      kind[p] = g.on_boundary(p) ? PointKind::Boundary : PointKind::Interior;
    return kind;
  }
  // Q2 parity rule; 0-based even axis index = knot level.
  for (int p = 0; p < g.points(); ++p) {
    const bool kx = g.ix(p) % 2 == 0;
    const bool ky = g.dimension == 2 ? g.iy(p) % 2 == 0 : true;
    if (kx && ky)
      kind[p] = PointKind::Knot;
    else if (!kx && !ky)
      kind[p] = PointKind::CellCenter;
    else if (!kx)
      kind[p] = PointKind::EdgeCenterX;  // midline along x
    else
      kind[p] = PointKind::EdgeCenterY;  // midline along y
  }
  return kind;
}

std::vector<double> axis_quadrature_weights(const Grid& g) {
  std::vector<double> w(g.n);
  if (g.order == SchemeOrder::Second) {
    for (int i = 0; i < g.n; ++i) w[i] = g.axis_boundary(i) ? 0.5 * g.h : g.h;
  } else {
    for (int i = 0; i < g.n; ++i) {
      if (i % 2 == 1)
        w[i] = 4.0 * g.h / 3.0;                                    // cell midpoint
      else
        w[i] = g.axis_boundary(i) ? g.h / 3.0 : 2.0 * g.h / 3.0;  // knot
    }
  }
  return w;
}

Vector quadrature_weights(const Grid& g) {
  const std::vector<double> wa = axis_quadrature_weights(g);
  Vector w(g.points());
  if (g.dimension == 1) {
    for (int i = 0; i < g.n; ++i) w[i] = wa[i];
  } else {
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) w[g.index(i, j)] = wa[i] * wa[j];
  }
  return w;
}

Grid build_grid(const std::array<AxisBounds, 2>& bounds, int cells_per_axis, SchemeOrder order,
                int dimension) {
  validate(bounds, cells_per_axis, order, dimension);
  Grid g;
  g.dimension = dimension;
  g.order = order;
  g.bounds = bounds;
  g.cells = cells_per_axis;
  if (order == SchemeOrder::Second) {
    g.n = cells_per_axis + 1;
    g.h = bounds[0].width() / cells_per_axis;
  } else {
    g.n = 2 * cells_per_axis + 1;
    g.h = bounds[0].width() / (2 * cells_per_axis);
  }
  g.kind = classify_points(g);
  g.weights = quadrature_weights(g);
  return g;
}

Grid build_grid(AxisBounds bounds, int cells_per_axis, SchemeOrder order) {
  return build_grid({bounds, AxisBounds{}}, cells_per_axis, order, 1);
}

}  // namespace fpsolve
