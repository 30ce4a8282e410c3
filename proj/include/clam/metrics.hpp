#pragma once

#include <span>
#include <string>
#include <vector>

#include "clam/geom.hpp"

namespace clam::harness {

struct Metrics {
  double mae_x = 0.0;       // meters
  double mae_y = 0.0;       // meters
  double mae_theta = 0.0;   // radians, wrapped errors
  double avg_rmse = 0.0;    // meters, mean per-step position error norm
  std::vector<double> position_error;  // per-step series
};

// Throws std::domain_error when the trajectories differ in length.
Metrics compute_metrics(std::span<const geom::Pose2D> estimated,
                        std::span<const geom::Pose2D> reference);

// CSV with header step,x,y,theta.
void write_trajectory_csv(std::span<const geom::Pose2D> trajectory,
                          const std::string& path);
std::vector<geom::Pose2D> load_trajectory_csv(const std::string& path);

}  // namespace clam::harness
