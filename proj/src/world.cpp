#include "clam/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clam/raster_io.hpp"
#include "clam/rbpf.hpp"

namespace clam::harness {

namespace {

bool near_protected(double wx, double wy, std::span<const geom::Pose2D> poses,
                    double clearance) {
  for (const geom::Pose2D& p : poses) {
    const double dx = wx - p.x;
    const double dy = wy - p.y;
    if (dx * dx + dy * dy < clearance * clearance) return true;
  }
  return false;
}

}  // namespace

GroundTruthWorld generate_world(const WorldParams& params,
                                std::span<const geom::Pose2D> keep_clear) {
  GroundTruthWorld world;
  world.params = params;
  world.grid.resolution = params.resolution;
  world.grid.width_cells =
      static_cast<int>(std::lround(params.width_m / params.resolution));
  world.grid.height_cells =
      static_cast<int>(std::lround(params.height_m / params.resolution));
  world.grid.origin = {0.0, 0.0, 0.0};
  world.occupied.assign(world.grid.cell_count(), 0);

  const auto fill = [&](double wx, double wy) {
    if (!world.grid.contains(wx, wy)) return;
    if (near_protected(wx, wy, keep_clear, params.clearance_m)) return;
    world.occupied[world.grid.cell_at(wx, wy)] = 1;
  };

  std::mt19937_64 rng = rbpf::derive_rng(params.seed, 0, 0, 7);
  std::uniform_real_distribution<double> ux(0.0, params.width_m);
  std::uniform_real_distribution<double> uy(0.0, params.height_m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Corridor rings: closed rectangular walls inset from the border.
  for (double margin : {params.ring_outer_margin, params.ring_inner_margin}) {
    if (margin <= 0.0) continue;
    const double x0 = margin, x1 = params.width_m - margin;
    const double y0 = margin, y1 = params.height_m - margin;
    for (double s_pos = x0; s_pos <= x1; s_pos += params.resolution * 0.5) {
      fill(s_pos, y0);
      fill(s_pos, y1);
    }
    for (double s_pos = y0; s_pos <= y1; s_pos += params.resolution * 0.5) {
      fill(x0, s_pos);
      fill(x1, s_pos);
    }
  }

  // Axis-aligned rooms: rectangular wall loops with door gaps. The first
  // room is centered on the first protected pose so that a sensor starting
  // there always has structure in range.
  for (int r = 0; r < params.room_count; ++r) {
    double cx, cy;
    if (r == 0 && !keep_clear.empty()) {
      cx = keep_clear.front().x;
      cy = keep_clear.front().y;
    } else {
      cx = ux(rng);
      cy = uy(rng);
    }
    const double half_w = 2.6 + 1.4 * unit(rng);
    const double half_h = 2.6 + 1.4 * unit(rng);
    const int door_side_a = static_cast<int>(unit(rng) * 4.0);
    const int door_side_b = static_cast<int>(unit(rng) * 4.0);
    const double door_pos = 0.25 + 0.5 * unit(rng);  // fraction along a side
    const double door_half = 0.6 + 0.4 * unit(rng);
    for (int side = 0; side < 4; ++side) {
      const bool horizontal = side == 0 || side == 2;
      const double span = horizontal ? 2.0 * half_w : 2.0 * half_h;
      const bool has_door = side == door_side_a || side == door_side_b;
      for (double s = 0.0; s <= span; s += params.resolution * 0.5) {
        if (has_door && std::abs(s - door_pos * span) < door_half) continue;
        switch (side) {
          case 0: fill(cx - half_w + s, cy - half_h); break;
          case 1: fill(cx + half_w, cy - half_h + s); break;
          case 2: fill(cx - half_w + s, cy + half_h); break;
          default: fill(cx - half_w, cy - half_h + s); break;
        }
      }
    }
  }

  // Interior walls with door gaps.
  for (int w = 0; w < params.wall_count; ++w) {
    const bool horizontal = unit(rng) < 0.5;
    const double coord =
        (horizontal ? params.height_m : params.width_m) * (0.2 + 0.6 * unit(rng));
    const double span = horizontal ? params.width_m : params.height_m;
    const double gap_center = span * (0.2 + 0.6 * unit(rng));
    const double gap_half = 0.8 + 0.8 * unit(rng);
    for (double s = 0.0; s < span; s += params.resolution * 0.5) {
      if (std::abs(s - gap_center) < gap_half) continue;
      if (horizontal)
        fill(s, coord);
      else
        fill(coord, s);
    }
  }

  // Random convex clutter: axis-aligned rectangles and discs.
  for (int c = 0; c < params.clutter_count; ++c) {
    const double cx = ux(rng);
    const double cy = uy(rng);
    if (unit(rng) < 0.5) {
      const double half_w = 0.2 + 1.0 * unit(rng);
      const double half_h = 0.2 + 1.0 * unit(rng);
      for (double x = cx - half_w; x <= cx + half_w; x += params.resolution * 0.5)
        for (double y = cy - half_h; y <= cy + half_h;
             y += params.resolution * 0.5)
          fill(x, y);
    } else {
      const double radius = 0.2 + 0.9 * unit(rng);
      for (double x = cx - radius; x <= cx + radius; x += params.resolution * 0.5)
        for (double y = cy - radius; y <= cy + radius;
             y += params.resolution * 0.5)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius)
            fill(x, y);
    }
  }

  // Closed border, immune to clearance.
  for (int ix = 0; ix < world.grid.width_cells; ++ix) {
    world.occupied[world.grid.flat(ix, 0)] = 1;
    world.occupied[world.grid.flat(ix, world.grid.height_cells - 1)] = 1;
  }
  for (int iy = 0; iy < world.grid.height_cells; ++iy) {
    world.occupied[world.grid.flat(0, iy)] = 1;
    world.occupied[world.grid.flat(world.grid.width_cells - 1, iy)] = 1;
  }
  return world;
}

double cast_range(const GroundTruthWorld& world,
                  const geom::Pose2D& sensor_pose, double bearing,
                  double z_max) {
  const geom::RayTrace trace =
      geom::trace_ray(world.grid, sensor_pose, bearing, z_max);
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (world.occupied[trace.cells[i]]) return trace.entry[i];
  return z_max;
}

sensor::Scan simulate_scan(const GroundTruthWorld& world,
                           const geom::Pose2D& pose,
                           const info::ScanGeometry& geometry, double z_max,
                           const SensorNoise& noise, std::mt19937_64& rng) {
  const geom::Pose2D sensor_pose = geom::compose(pose, geometry.sensor_offset);
  if (world.occupied_at(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("simulate_scan: pose inside an occupied cell");
  std::normal_distribution<double> gauss(0.0, 1.0);
  sensor::Scan scan;
  scan.sensor_offset = geometry.sensor_offset;
  for (double bearing : sensor::uniform_bearings(geometry.fov, geometry.n_z)) {
    const double cast_bearing = sensor_pose.theta + bearing +
                                noise.sigma_bearing * gauss(rng);
    const double true_range = cast_range(world, sensor_pose, cast_bearing,
                                         z_max);
    double range = z_max;
    if (true_range < z_max)
      range = std::clamp(true_range + noise.sigma_range * gauss(rng), 0.0,
                         z_max);
    scan.beams.push_back({bearing, range});
  }
  return scan;
}

std::vector<geom::Pose2D> loop_trajectory(const WorldParams& params, int steps,
                                          double margin_m) {
  // Rectangle with quarter-circle corners, traversed counterclockwise.
  const double r = std::min(2.0, margin_m * 0.5);
  const double x0 = margin_m, x1 = params.width_m - margin_m;
  const double y0 = margin_m, y1 = params.height_m - margin_m;
  const double straight_x = x1 - x0 - 2.0 * r;
  const double straight_y = y1 - y0 - 2.0 * r;
  if (straight_x <= 0.0 || straight_y <= 0.0)
    throw std::domain_error("loop_trajectory: margin too large for world");
  const double perimeter =
      2.0 * straight_x + 2.0 * straight_y + 2.0 * geom::kPi * r;

  const auto pose_at = [&](double s) -> geom::Pose2D {
    // Segment order: bottom, corner, right, corner, top, corner, left, corner.
    struct Leg {
      double length;
      int kind;  // 0..3 straight edges, 4..7 corner arcs
    };
    const Leg legs[8] = {{straight_x, 0}, {0.5 * geom::kPi * r, 4},
                         {straight_y, 1}, {0.5 * geom::kPi * r, 5},
                         {straight_x, 2}, {0.5 * geom::kPi * r, 6},
                         {straight_y, 3}, {0.5 * geom::kPi * r, 7}};
    for (const Leg& leg : legs) {
      if (s > leg.length) {
        s -= leg.length;
        continue;
      }
      const double frac = s / leg.length;
      switch (leg.kind) {
        case 0: return {x0 + r + s, y0, 0.0};
        case 1: return {x1, y0 + r + s, 0.5 * geom::kPi};
        case 2: return {x1 - r - s, y1, geom::kPi};
        case 3: return {x0, y1 - r - s, -0.5 * geom::kPi};
        case 4: {
          const double a = frac * 0.5 * geom::kPi;
          return {x1 - r + r * std::sin(a), y0 + r - r * std::cos(a),
                  geom::wrap_angle(a)};
        }
        case 5: {
          const double a = frac * 0.5 * geom::kPi;
          return {x1 - r + r * std::cos(a), y1 - r + r * std::sin(a),
                  geom::wrap_angle(0.5 * geom::kPi + a)};
        }
        case 6: {
          const double a = frac * 0.5 * geom::kPi;
          return {x0 + r - r * std::sin(a), y1 - r + r * std::cos(a),
                  geom::wrap_angle(geom::kPi + a)};
        }
        default: {
          const double a = frac * 0.5 * geom::kPi;
          return {x0 + r - r * std::cos(a), y0 + r - r * std::sin(a),
                  geom::wrap_angle(-0.5 * geom::kPi + a)};
        }
      }
    }
    return {x0 + r, y0, 0.0};
  };

  std::vector<geom::Pose2D> trajectory(steps);
  for (int k = 0; k < steps; ++k)
    trajectory[k] = pose_at(perimeter * k / steps);
  return trajectory;
}

void write_world_pgm(const GroundTruthWorld& world, const std::string& path) {
  std::vector<double> occ(world.occupied.begin(), world.occupied.end());
  io::write_pgm(world.grid.width_cells, world.grid.height_cells, occ, path);
}

}  // namespace clam::harness
