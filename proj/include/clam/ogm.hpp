#pragma once

#include <string>
#include <vector>

#include "clam/geom.hpp"
#include "clam/sensor.hpp"

namespace clam::ogm {

struct LogOddsParams {
  double hit_increment = 0.85;
  double miss_increment = -0.4;
  double clamp = 10.0;
  double occupied_threshold = 0.5;
};

// Classical occupancy grid: one clamped log-odds value per cell.
class LogOddsMap {
 public:
  LogOddsMap() = default;
  explicit LogOddsMap(const geom::GridSpec& grid,
                      const LogOddsParams& params = {});

  const geom::GridSpec& grid() const { return grid_; }
  const LogOddsParams& params() const { return params_; }
  double log_odds(int cell) const { return log_odds_[cell]; }
  double occupancy(int cell) const {
    return 1.0 / (1.0 + std::exp(-log_odds_[cell]));
  }
  bool occupied(int cell) const {
    return occupancy(cell) > params_.occupied_threshold;
  }

  // Inverse sensor model: miss increments on cells before the return, a hit
  // increment on the return cell; max-range beams update free space only.
  // Throws std::domain_error if the sensor pose is outside the grid.
  void integrate_scan(const geom::Pose2D& pose, const sensor::Scan& scan,
                      const sensor::BeamModelParams& params);

  // Range predicted by ray-casting to the first cell whose occupancy
  // exceeds the threshold; z_max_range when no such cell is hit.
  double predict_range(const geom::Pose2D& sensor_pose, double bearing,
                       const sensor::BeamModelParams& params) const;

 private:
  void add(int cell, double delta);

  geom::GridSpec grid_;
  LogOddsParams params_;
  std::vector<double> log_odds_;
};

// Fixed-map measurement log-likelihood: per beam, beam_density of the
// observed range against the predicted range, summed in log space.
double fixed_map_log_likelihood(const LogOddsMap& map, const geom::Pose2D& pose,
                                const sensor::Scan& scan,
                                const sensor::BeamModelParams& params);

void write_occupancy_pgm(const LogOddsMap& map, const std::string& path);

}  // namespace clam::ogm
