#pragma once

#include <cmath>
#include <vector>

namespace clam::geom {

constexpr double kPi = 3.14159265358979323846;

// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

struct Pose2D {
  double x = 0.0;      // meters
  double y = 0.0;      // meters
  double theta = 0.0;  // radians, wrapped to (-pi, pi]
};

// Rigid-body composition a (+) delta in SE(2); the result's heading is wrapped.
Pose2D compose(const Pose2D& a, const Pose2D& delta);

// Relative motion delta such that compose(a, delta) == b.
Pose2D between(const Pose2D& a, const Pose2D& b);

// Axis-aligned uniform grid. `origin` is the world position of the outer
// corner of cell (0,0); its heading is ignored by the index math.
struct GridSpec {
  int width_cells = 0;
  int height_cells = 0;
  double resolution = 0.0;  // meters per cell
  Pose2D origin;

  int cell_count() const { return width_cells * height_cells; }
  bool valid() const {
    return width_cells > 0 && height_cells > 0 && resolution > 0.0;
  }
  bool contains(double wx, double wy) const {
    return wx >= origin.x && wy >= origin.y &&
           wx < origin.x + width_cells * resolution &&
           wy < origin.y + height_cells * resolution;
  }
  int flat(int ix, int iy) const { return iy * width_cells + ix; }
  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && ix < width_cells && iy >= 0 && iy < height_cells;
  }
  int cell_x(double wx) const {
    return static_cast<int>(std::floor((wx - origin.x) / resolution));
  }
  int cell_y(double wy) const {
    return static_cast<int>(std::floor((wy - origin.y) / resolution));
  }
  // Flat index of the cell containing (wx, wy); caller checks contains().
  int cell_at(double wx, double wy) const {
    return flat(cell_x(wx), cell_y(wy));
  }
  double center_x(int ix) const {
    return origin.x + (ix + 0.5) * resolution;
  }
  double center_y(int iy) const {
    return origin.y + (iy + 0.5) * resolution;
  }
};

// Cells crossed by a ray, ordered outward. The cell containing the ray
// origin is not part of the trace; `entry[i]` is the range at which the
// segment enters cells[i]. Entry ranges are nondecreasing: ties occur only
// when the ray passes exactly through a cell corner, in which case both
// edge-adjacent cells are included ahead of the diagonal one (supercover).
struct RayTrace {
  std::vector<int> cells;
  std::vector<double> entry;
  double terminal = 0.0;    // min(max_range, range at which the ray leaves the grid)
  double resolution = 0.0;

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
};

// Walks the grid from `origin` along `bearing` for at most `max_range`
// meters. Throws std::domain_error if the origin lies outside the grid.
RayTrace trace_ray(const GridSpec& grid, const Pose2D& origin, double bearing,
                   double max_range);

}  // namespace clam::geom
