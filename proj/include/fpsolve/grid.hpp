#pragma once

#include <array>
#include <vector>

#include "fpsolve/types.hpp"

namespace fpsolve {

enum class PointKind { Interior, Boundary, Knot, EdgeCenterX, EdgeCenterY, CellCenter };

struct AxisBounds {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

// Uniform tensor grid of Gauss-Lobatto points with lumped quadrature weights.
//
// Storage is row-major with x running fastest: p = j*n + i with 0-based i, j.
// The order-4 grid carries the Q2 point classification: 0-based even axis
// indices sit on element knots, odd indices on element midlines, and each
// element spans two grid spacings per axis.  Grids are immutable after
// build_grid() and safe to share across threads for reads.
struct Grid {
  int dimension = 1;
  SchemeOrder order = SchemeOrder::Second;
  std::array<AxisBounds, 2> bounds{};
  int cells = 0;  // cells per axis
  int n = 0;      // grid points per axis
  double h = 0.0; // point spacing
  std::vector<PointKind> kind;
  Vector weights;

  int points() const { return dimension == 2 ? n * n : n; }
  int index(int i, int j = 0) const { return j * n + i; }
  int ix(int p) const { return p % n; }
  int iy(int p) const { return dimension == 2 ? p / n : 0; }
  double coord(int axis, int i) const { return bounds[axis].lo + i * h; }
  double x(int p) const { return coord(0, ix(p)); }
  double y(int p) const { return dimension == 2 ? coord(1, iy(p)) : 0.0; }
  bool axis_boundary(int i) const { return i == 0 || i == n - 1; }
  bool on_boundary(int p) const {
    return axis_boundary(ix(p)) || (dimension == 2 && axis_boundary(iy(p)));
  }
  double volume() const {
    double v = bounds[0].width();
    return dimension == 2 ? v * bounds[1].width() : v;
  }
};

Grid build_grid(const std::array<AxisBounds, 2>& bounds, int cells_per_axis,
                SchemeOrder order, int dimension);

// Convenience for 1D domains.
Grid build_grid(AxisBounds bounds, int cells_per_axis, SchemeOrder order);

// Composite Gauss-Lobatto weights along one axis; the grid's stored weights
// are their tensor products.
std::vector<double> axis_quadrature_weights(const Grid& grid);
Vector quadrature_weights(const Grid& grid);
std::vector<PointKind> classify_points(const Grid& grid);

}  // namespace fpsolve
