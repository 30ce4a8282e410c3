#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "clam/geom.hpp"

using namespace clam;
using geom::GridSpec;
using geom::Pose2D;
using geom::RayTrace;

namespace {

// Brute-force supercover oracle: for every cell, clip the segment against
// the closed cell rectangle (slab method) and keep cells whose parameter
// interval is nonempty strictly after the start and before the terminal.
struct OracleCell {
  int flat;
  double entry;
};

std::vector<OracleCell> clip_oracle(const GridSpec& g, const Pose2D& origin,
                                    double bearing, double max_range) {
  const double dx = std::cos(bearing);
  const double dy = std::sin(bearing);
  double terminal = max_range;
  {
    const double x1 = g.origin.x + g.width_cells * g.resolution;
    const double y1 = g.origin.y + g.height_cells * g.resolution;
    if (dx > 0.0) terminal = std::min(terminal, (x1 - origin.x) / dx);
    if (dx < 0.0) terminal = std::min(terminal, (g.origin.x - origin.x) / dx);
    if (dy > 0.0) terminal = std::min(terminal, (y1 - origin.y) / dy);
    if (dy < 0.0) terminal = std::min(terminal, (g.origin.y - origin.y) / dy);
  }
  std::vector<OracleCell> cells;
  for (int iy = 0; iy < g.height_cells; ++iy) {
    for (int ix = 0; ix < g.width_cells; ++ix) {
      const double x0 = g.origin.x + ix * g.resolution;
      const double y0 = g.origin.y + iy * g.resolution;
      double t_in = 0.0, t_out = terminal;
      bool hit = true;
      if (std::abs(dx) > 0.0) {
        double a = (x0 - origin.x) / dx;
        double b = (x0 + g.resolution - origin.x) / dx;
        if (a > b) std::swap(a, b);
        t_in = std::max(t_in, a);
        t_out = std::min(t_out, b);
      } else if (origin.x < x0 || origin.x > x0 + g.resolution) {
        hit = false;
      }
      if (std::abs(dy) > 0.0) {
        double a = (y0 - origin.y) / dy;
        double b = (y0 + g.resolution - origin.y) / dy;
        if (a > b) std::swap(a, b);
        t_in = std::max(t_in, a);
        t_out = std::min(t_out, b);
      } else if (origin.y < y0 || origin.y > y0 + g.resolution) {
        hit = false;
      }
      const double tol = 1e-12 * std::max(1.0, t_in);
      if (hit && t_out >= t_in - tol && t_in > 0.0 && t_in < terminal)
        cells.push_back({g.flat(ix, iy), t_in});
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const OracleCell& a, const OracleCell& b) {
              return a.entry < b.entry;
            });
  return cells;
}

// Dense-sampling check: cells visited by sampling the segment at
// 1e-3*resolution steps. Slivers shorter than the step can be missed, so
// this is asserted as an ordered subsequence of the trace.
std::vector<int> sampled_cells(const GridSpec& g, const Pose2D& origin,
                               double bearing, double max_range) {
  const double dx = std::cos(bearing);
  const double dy = std::sin(bearing);
  const double step = 1e-3 * g.resolution;
  std::vector<int> cells;
  const int origin_cell = g.cell_at(origin.x, origin.y);
  for (double t = step; t < max_range; t += step) {
    const double x = origin.x + t * dx;
    const double y = origin.y + t * dy;
    if (!g.contains(x, y)) break;
    const int cell = g.cell_at(x, y);
    if (cell == origin_cell && cells.empty()) continue;
    if (cells.empty() || cells.back() != cell) cells.push_back(cell);
  }
  return cells;
}

GridSpec make_grid(int w, int h, double res, double ox = 0.0, double oy = 0.0) {
  GridSpec g;
  g.width_cells = w;
  g.height_cells = h;
  g.resolution = res;
  g.origin = {ox, oy, 0.0};
  return g;
}

}  // namespace

TEST_CASE("compose identities") {
  const Pose2D a = geom::compose({0, 0, 0}, {1, 0, 0});
  CHECK(a.x == doctest::Approx(1.0));
  CHECK(a.y == doctest::Approx(0.0));
  CHECK(a.theta == doctest::Approx(0.0));

  const Pose2D b = geom::compose({0, 0, geom::kPi / 2}, {1, 0, 0});
  CHECK(b.x == doctest::Approx(0.0));
  CHECK(b.y == doctest::Approx(1.0));
  CHECK(b.theta == doctest::Approx(geom::kPi / 2));

  const Pose2D c = geom::compose({1, 1, geom::kPi}, {0, 0, geom::kPi});
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(1.0));
  CHECK(c.theta == doctest::Approx(0.0));
  CHECK(c.theta > -geom::kPi);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(geom::wrap_angle(geom::kPi) == doctest::Approx(geom::kPi));
  CHECK(geom::wrap_angle(-geom::kPi) == doctest::Approx(geom::kPi));
  CHECK(geom::wrap_angle(3 * geom::kPi) == doctest::Approx(geom::kPi));
  for (double t = -20.0; t < 20.0; t += 0.37) {
    const double w = geom::wrap_angle(t);
    CHECK(w > -geom::kPi);
    CHECK(w <= geom::kPi);
  }
}

TEST_CASE("compose associativity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose2D a{u(rng), u(rng), geom::wrap_angle(u(rng))};
    const Pose2D b{u(rng), u(rng), geom::wrap_angle(u(rng))};
    const Pose2D c{u(rng), u(rng), geom::wrap_angle(u(rng))};
    const Pose2D lhs = geom::compose(geom::compose(a, b), c);
    const Pose2D rhs = geom::compose(a, geom::compose(b, c));
    CHECK(std::abs(lhs.x - rhs.x) < 1e-9);
    CHECK(std::abs(lhs.y - rhs.y) < 1e-9);
    CHECK(std::abs(geom::wrap_angle(lhs.theta - rhs.theta)) < 1e-9);
  }
}

TEST_CASE("between inverts compose") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose2D a{u(rng), u(rng), geom::wrap_angle(u(rng))};
    const Pose2D d{u(rng), u(rng), geom::wrap_angle(u(rng))};
    const Pose2D b = geom::compose(a, d);
    const Pose2D d2 = geom::between(a, b);
    CHECK(std::abs(d2.x - d.x) < 1e-9);
    CHECK(std::abs(d2.y - d.y) < 1e-9);
    CHECK(std::abs(geom::wrap_angle(d2.theta - d.theta)) < 1e-9);
  }
}

TEST_CASE("grid index round trip") {
  const GridSpec g = make_grid(17, 9, 0.25, -1.3, 2.7);
  for (int iy = 0; iy < g.height_cells; ++iy)
    for (int ix = 0; ix < g.width_cells; ++ix)
      CHECK(g.cell_at(g.center_x(ix), g.center_y(iy)) == g.flat(ix, iy));
}

TEST_CASE("trace_ray axis aligned") {
  const GridSpec g = make_grid(10, 10, 0.2);
  const Pose2D origin{0.5, 0.5, 0.0};  // center of cell (2,2)
  const RayTrace t = geom::trace_ray(g, origin, 0.0, 1.0);
  REQUIRE(t.size() == 5);
  const double expected[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (int i = 0; i < 5; ++i) {
    CHECK(t.entry[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(t.cells[i] == g.flat(3 + i, 2));
  }
  CHECK(t.terminal == doctest::Approx(1.0));
}

TEST_CASE("trace_ray diagonal supercover corner") {
  const GridSpec g = make_grid(10, 10, 0.2);
  const Pose2D origin{0.5, 0.5, 0.0};  // center of cell (2,2)
  const double range = 0.2 * std::sqrt(2.0);
  const RayTrace t = geom::trace_ray(g, origin, geom::kPi / 4.0, range);
  // Exact corner crossing: both edge-adjacent cells plus the diagonal.
  REQUIRE(t.size() == 3);
  CHECK(t.cells[0] == g.flat(3, 2));
  CHECK(t.cells[1] == g.flat(2, 3));
  CHECK(t.cells[2] == g.flat(3, 3));
  const double corner = 0.1 * std::sqrt(2.0);
  for (int i = 0; i < 3; ++i)
    CHECK(t.entry[i] == doctest::Approx(corner).epsilon(1e-9));
}

TEST_CASE("trace_ray degenerate and error cases") {
  const GridSpec g = make_grid(10, 10, 0.2);
  const RayTrace t = geom::trace_ray(g, {0.5, 0.5, 0}, 0.3, 0.0);
  CHECK(t.empty());
  CHECK(t.terminal == 0.0);
  CHECK_THROWS_AS(geom::trace_ray(g, {-1.0, 0.5, 0}, 0.0, 1.0),
                  std::domain_error);
}

TEST_CASE("trace_ray stops at the grid edge") {
  const GridSpec g = make_grid(5, 5, 0.2);
  const RayTrace t = geom::trace_ray(g, {0.5, 0.5, 0}, 0.0, 100.0);
  CHECK(t.terminal == doctest::Approx(0.5));
  REQUIRE(t.size() == 2);
  CHECK(t.cells.back() == g.flat(4, 2));
}

TEST_CASE("trace_ray matches the supercover oracle on random rays") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(3, 28);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double res = 0.05 + 0.45 * unit(rng);
    const GridSpec g =
        make_grid(dim(rng), dim(rng), res, unit(rng) - 0.5, unit(rng) - 0.5);
    const Pose2D origin{g.origin.x + unit(rng) * g.width_cells * res,
                        g.origin.y + unit(rng) * g.height_cells * res, 0.0};
    const double bearing = (2.0 * unit(rng) - 1.0) * geom::kPi;
    const double diag = res * std::hypot(g.width_cells, g.height_cells);
    const double max_range = unit(rng) * diag;

    const RayTrace t = geom::trace_ray(g, origin, bearing, max_range);
    const std::vector<OracleCell> oracle =
        clip_oracle(g, origin, bearing, max_range);
    REQUIRE(t.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(t.cells[i] == oracle[i].flat);
      CHECK(t.entry[i] == doctest::Approx(oracle[i].entry).epsilon(1e-9));
    }

    // Dense sampling at 1e-3*resolution visits an ordered subsequence of
    // the trace (sub-step corner slivers are allowed to be missing there).
    const std::vector<int> sampled =
        sampled_cells(g, origin, bearing, std::min(max_range, t.terminal));
    std::size_t matched = 0, scan = 0;
    for (int cell : sampled) {
      while (scan < t.size() && t.cells[scan] != cell) ++scan;
      if (scan < t.size()) {
        ++matched;
        ++scan;
      }
    }
    CHECK(matched == sampled.size());

    // Entry ranges nondecreasing, gaps bounded by res * sqrt(2).
    for (std::size_t i = 1; i < t.size(); ++i) {
      CHECK(t.entry[i] >= t.entry[i - 1] - 1e-12);
      CHECK(t.entry[i] - t.entry[i - 1] <= res * std::sqrt(2.0) + 1e-9);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(t.entry[i] > 0.0);
      CHECK(t.entry[i] < t.terminal);
    }
  }
}
