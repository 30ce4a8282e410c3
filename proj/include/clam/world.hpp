#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clam/geom.hpp"
#include "clam/info.hpp"
#include "clam/sensor.hpp"

namespace clam::harness {

struct WorldParams {
  double width_m = 40.0;
  double height_m = 40.0;
  double resolution = 0.2;
  int clutter_count = 25;    // random convex obstacles
  int wall_count = 2;        // interior axis-aligned walls with door gaps
  int room_count = 1;        // axis-aligned rectangular rooms with doors
  // Rectangular wall rings inset from the border; negative disables. A pair
  // of rings bounds a closed corridor.
  double ring_outer_margin = -1.0;
  double ring_inner_margin = -1.0;
  double clearance_m = 1.2;  // obstacle-free margin around protected poses
  std::uint64_t seed = 1;
};

// Binary ground-truth occupancy raster; border cells are always occupied.
struct GroundTruthWorld {
  geom::GridSpec grid;
  std::vector<std::uint8_t> occupied;
  WorldParams params;

  bool occupied_at(double wx, double wy) const {
    if (!grid.contains(wx, wy)) return true;
    return occupied[grid.cell_at(wx, wy)] != 0;
  }
};

// Seeded generator: closed border, interior walls with gaps, and random
// rectangles/discs, none within clearance of the protected poses.
GroundTruthWorld generate_world(const WorldParams& params,
                                std::span<const geom::Pose2D> keep_clear = {});

struct SensorNoise {
  double sigma_range = 0.01;    // meters
  double sigma_bearing = 0.01;  // radians, applied to the cast direction only
};

// Range to the first occupied cell along the bearing, or z_max when none.
double cast_range(const GroundTruthWorld& world, const geom::Pose2D& sensor_pose,
                  double bearing, double z_max);

// Noisy synthetic scan taken at `pose`. Throws std::domain_error when the
// pose lies in an occupied cell.
sensor::Scan simulate_scan(const GroundTruthWorld& world,
                           const geom::Pose2D& pose,
                           const info::ScanGeometry& geometry, double z_max,
                           const SensorNoise& noise, std::mt19937_64& rng);

// Rounded-rectangle loop through the world interior, sampled at `steps`
// poses with headings along the path.
std::vector<geom::Pose2D> loop_trajectory(const WorldParams& params, int steps,
                                          double margin_m = 6.0);

void write_world_pgm(const GroundTruthWorld& world, const std::string& path);

}  // namespace clam::harness
