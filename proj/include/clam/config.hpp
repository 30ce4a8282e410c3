#pragma once

#include <cstdint>
#include <string>

#include "clam/rbpf.hpp"
#include "clam/sensor.hpp"

namespace clam::harness {

// Flat run configuration shared by the CLI subcommands. Defaults are the
// desk-scale exploration values; the slam subcommand swaps in its own sensor
// defaults before applying overrides.
struct RunConfig {
  std::uint64_t seed = 1;

  // World generation.
  double world_width = 20.0;
  double world_height = 20.0;
  double resolution = 0.2;
  int clutter = 16;
  int walls = 2;
  int rooms = 1;
  double corridor = -1.0;  // slam: corridor width around the loop (m)
  double clearance = 2.0;

  // Sensor.
  int n_z = 10;
  double fov = 2.0 * geom::kPi;
  double z_max = 5.0;
  double z_hit = 0.7;
  double z_short = 0.1;
  double z_max_weight = 0.1;
  double z_rand = 0.1;
  double sigma_hit = 0.05;
  double lambda_short = 0.2;
  double sensor_sigma_range = 0.01;
  double sensor_sigma_bearing = 0.01;

  // Odometry noise: the alphas corrupt the simulated readings; the filter
  // models the same form inflated by filter_alpha_scale for correction
  // headroom.
  double alpha1 = 0.005;
  double alpha2 = 0.002;
  double alpha3 = 0.002;
  double alpha4 = 0.001;
  double filter_alpha_scale = 3.0;

  // Filter.
  int particles = 100;
  int map_bins = 10;
  int steps = 200;

  // Information / planner.
  double outcome_bin = 0.1;
  double alpha = 0.5;
  double ric_threshold = 0.005;
  double budget = 1000.0;
  double steer = 1.0;
  int window = 30;
  int thin_particles = 20;
  int init_scans = 32;
  bool normalized_entropy = false;  // entropy exports in [0,1] instead of bits

  sensor::BeamModelParams beam_params() const {
    sensor::BeamModelParams p;
    p.z_hit = z_hit;
    p.z_short = z_short;
    p.z_max = z_max_weight;
    p.z_rand = z_rand;
    p.sigma_hit = sigma_hit;
    p.lambda_short = lambda_short;
    p.z_max_range = z_max;
    return p;
  }
  rbpf::OdometryModelParams odometry_params() const {
    return {alpha1, alpha2, alpha3, alpha4};
  }
  rbpf::OdometryModelParams filter_odometry_params() const {
    const double s = filter_alpha_scale;
    return {s * alpha1, s * alpha2, s * alpha3, s * alpha4};
  }
};

// Desk-scale defaults: the struct defaults are the exploration values;
// slam_defaults() swaps in the larger world and denser sensing.
RunConfig explore_defaults();
RunConfig slam_defaults();

// Applies `key value` (or `key = value`) overrides from a plain-text file;
// '#' starts a comment. Throws on unknown keys or unparsable values.
void apply_config_file(RunConfig& config, const std::string& path);
// Single override, same keys as the file format.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

// Canonical serialization of every field, used for hashing and the JSON echo.
std::string config_to_string(const RunConfig& config);
// FNV-1a hash of the canonical serialization, as 8 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace clam::harness
