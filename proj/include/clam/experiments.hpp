#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clam/config.hpp"
#include "clam/metrics.hpp"
#include "clam/planner.hpp"
#include "clam/rbpf.hpp"
#include "clam/scan_log.hpp"
#include "clam/world.hpp"

namespace clam::harness {

struct SlamResult {
  std::vector<geom::Pose2D> estimated;
  std::vector<geom::Pose2D> reference;  // empty when no reference is known
  Metrics metrics;                      // valid only when reference nonempty
  int resample_count = 0;
  double wall_seconds = 0.0;
};

// Simulated-world SLAM run: generates the world and loop trajectory from the
// config, corrupts odometry, simulates scans, and drives the filter.
SlamResult run_slam(const RunConfig& config, rbpf::MapMode mode,
                    const std::string& out_dir = "");

// Replays a recorded log; metrics are computed when a reference trajectory
// (one pose per SCAN record) is supplied.
SlamResult run_slam_log(const ScanLog& log, const RunConfig& config,
                        rbpf::MapMode mode,
                        const std::vector<geom::Pose2D>& reference = {},
                        const std::string& out_dir = "");

struct ExploreResult {
  planner::IIGTree tree;
  std::vector<int> best_path;
  bool converged = false;
  double total_info = 0.0;      // bits, summed over all nodes
  double total_cost = 0.0;      // meters, summed over all edges
  double best_path_info = 0.0;  // bits along the returned path
  double best_path_cost = 0.0;
  double mean_i_ric = 0.0;      // over accepted nodes
  double wall_seconds = 0.0;
};

// Exploration evaluation: builds the initial maps from spin scans at the
// start pose, then grows the information tree with the selected function.
ExploreResult run_explore(const RunConfig& config,
                          planner::InfoFunction info_function,
                          const std::string& out_dir = "");

// Generates a world plus a noisy odometry/scan log along the loop
// trajectory, for the simulate subcommand.
void write_simulated_dataset(const RunConfig& config,
                             const std::string& out_dir);

}  // namespace clam::harness
