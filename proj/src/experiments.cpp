#include "clam/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "clam/crm.hpp"
#include "clam/info.hpp"
#include "clam/ogm.hpp"
#include "clam/raster_io.hpp"

namespace clam::harness {

namespace {

constexpr std::uint64_t kPurposeOdomNoise = 11;
constexpr std::uint64_t kPurposeScanNoise = 12;
constexpr std::uint64_t kPurposeStartSpread = 13;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

rbpf::OdometryReading corrupt_odometry(const rbpf::OdometryReading& u,
                                       const rbpf::OdometryModelParams& alpha,
                                       std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double var_rot1 =
      alpha.alpha1 * u.rot1 * u.rot1 + alpha.alpha2 * u.trans * u.trans;
  const double var_trans =
      alpha.alpha3 * u.trans * u.trans +
      alpha.alpha4 * (u.rot1 * u.rot1 + u.rot2 * u.rot2);
  const double var_rot2 =
      alpha.alpha1 * u.rot2 * u.rot2 + alpha.alpha2 * u.trans * u.trans;
  rbpf::OdometryReading noisy = u;
  if (var_rot1 > 0.0) noisy.rot1 += std::sqrt(var_rot1) * gauss(rng);
  if (var_trans > 0.0) noisy.trans += std::sqrt(var_trans) * gauss(rng);
  if (var_rot2 > 0.0) noisy.rot2 += std::sqrt(var_rot2) * gauss(rng);
  return noisy;
}

WorldParams world_params_from(const RunConfig& config) {
  WorldParams params;
  params.width_m = config.world_width;
  params.height_m = config.world_height;
  params.resolution = config.resolution;
  params.clutter_count = config.clutter;
  params.wall_count = config.walls;
  params.room_count = config.rooms;
  params.clearance_m = config.clearance;
  params.seed = config.seed;
  return params;
}

double loop_margin(const RunConfig& config) {
  return std::max(2.0, 0.15 * std::min(config.world_width,
                                       config.world_height));
}

void export_slam_artifacts(const std::string& out_dir, const SlamResult& result,
                           const rbpf::ParticleSet& set, rbpf::MapMode mode,
                           const RunConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_trajectory_csv(result.estimated, out_dir + "/estimated.csv");
  if (!result.reference.empty())
    write_trajectory_csv(result.reference, out_dir + "/reference.csv");

  // Highest-weight particle's map.
  const std::vector<double> w = rbpf::normalized_weights(set);
  int best = 0;
  for (int j = 1; j < set.size(); ++j)
    if (w[j] > w[best]) best = j;
  if (mode == rbpf::MapMode::kClam) {
    crm::write_occupancy_pgm(set.particles[best].crm_map(),
                             out_dir + "/map.pgm");
    crm::write_entropy_csv(set.particles[best].crm_map(),
                           out_dir + "/entropy.csv");
  } else {
    ogm::write_occupancy_pgm(set.particles[best].ogm_map(),
                             out_dir + "/map.pgm");
  }

  nlohmann::json summary;
  summary["config"] = config_to_string(config);
  summary["mode"] = mode == rbpf::MapMode::kClam ? "clam" : "ogm";
  summary["resamples"] = result.resample_count;
  summary["wall_seconds"] = result.wall_seconds;
  if (!result.reference.empty()) {
    summary["mae_x"] = result.metrics.mae_x;
    summary["mae_y"] = result.metrics.mae_y;
    summary["mae_theta"] = result.metrics.mae_theta;
    summary["avg_rmse"] = result.metrics.avg_rmse;
  }
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
}

SlamResult drive_filter(rbpf::ParticleSet& set,
                        const std::vector<rbpf::OdometryReading>& odometry,
                        const std::vector<sensor::Scan>& scans,
                        const std::vector<geom::Pose2D>& reference,
                        const RunConfig& config, rbpf::MapMode mode) {
  rbpf::StepConfig step_config;
  step_config.mode = mode;
  step_config.odometry = config.filter_odometry_params();
  step_config.beam = config.beam_params();

  SlamResult result;
  result.reference = reference;
  const auto t0 = Clock::now();
  result.estimated.push_back(rbpf::estimate(set));
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const rbpf::StepStats stats =
        rbpf::step(set, odometry[k], scans[k], step_config);
    if (stats.resampled) ++result.resample_count;
    result.estimated.push_back(rbpf::estimate(set));
  }
  result.wall_seconds = seconds_since(t0);
  if (!reference.empty())
    result.metrics = compute_metrics(result.estimated, reference);
  return result;
}

}  // namespace

SlamResult run_slam(const RunConfig& config, rbpf::MapMode mode,
                    const std::string& out_dir) {
  WorldParams world_params = world_params_from(config);
  const double margin = loop_margin(config);
  if (config.corridor > 0.0) {
    world_params.ring_outer_margin = margin - 0.5 * config.corridor;
    world_params.ring_inner_margin = margin + 0.5 * config.corridor;
  }
  const std::vector<geom::Pose2D> truth =
      loop_trajectory(world_params, config.steps, margin);
  const GroundTruthWorld world = generate_world(world_params, truth);

  info::ScanGeometry geometry;
  geometry.n_z = config.n_z;
  geometry.fov = config.fov;
  const SensorNoise noise{config.sensor_sigma_range,
                          config.sensor_sigma_bearing};

  // Odometry readings and scans along the trajectory (scan k observed at
  // truth[k] after applying reading k-1).
  std::vector<rbpf::OdometryReading> odometry;
  std::vector<sensor::Scan> scans;
  for (int k = 1; k < config.steps; ++k) {
    const rbpf::OdometryReading u_true =
        rbpf::OdometryReading::from_poses(truth[k - 1], truth[k]);
    std::mt19937_64 odom_rng =
        rbpf::derive_rng(config.seed, k, 0, kPurposeOdomNoise);
    odometry.push_back(
        corrupt_odometry(u_true, config.odometry_params(), odom_rng));
    std::mt19937_64 scan_rng =
        rbpf::derive_rng(config.seed, k, 0, kPurposeScanNoise);
    scans.push_back(simulate_scan(world, truth[k], geometry, config.z_max,
                                  noise, scan_rng));
  }

  rbpf::ParticleSet set;
  if (mode == rbpf::MapMode::kClam) {
    const crm::ConfidenceRichMap map(world.grid, config.map_bins);
    set = rbpf::init_particle_set(config.particles, truth[0], map, config.seed);
  } else {
    const ogm::LogOddsMap map(world.grid);
    set = rbpf::init_particle_set(config.particles, truth[0], map, config.seed);
  }

  SlamResult result = drive_filter(set, odometry, scans, truth, config, mode);
  if (!out_dir.empty()) {
    export_slam_artifacts(out_dir, result, set, mode, config);
    write_world_pgm(world, out_dir + "/world.pgm");
  }
  return result;
}

SlamResult run_slam_log(const ScanLog& log, const RunConfig& config,
                        rbpf::MapMode mode,
                        const std::vector<geom::Pose2D>& reference,
                        const std::string& out_dir) {
  // Pair each SCAN with the odometry accumulated since the previous SCAN.
  std::vector<rbpf::OdometryReading> odometry;
  std::vector<sensor::Scan> scans;
  std::size_t io = 0, is = 0;
  std::optional<geom::Pose2D> last_odom;
  std::optional<geom::Pose2D> last_used;
  for (ScanLog::Kind kind : log.order) {
    if (kind == ScanLog::Kind::kOdom) {
      last_odom = log.odom[io++].pose;
      if (!last_used) last_used = last_odom;
    } else {
      const ScanRecord& rec = log.scans[is++];
      if (!last_odom) continue;  // scans before any odometry are dropped
      odometry.push_back(
          rbpf::OdometryReading::from_poses(*last_used, *last_odom));
      last_used = last_odom;
      scans.push_back(log.make_scan(rec));
    }
  }

  // Size the replay grid from the odometry track's bounding box plus the
  // sensing range, so the mapped area always covers the recorded run.
  geom::Pose2D start{config.world_width / 2.0, config.world_height / 2.0, 0.0};
  double min_x = start.x, max_x = start.x, min_y = start.y, max_y = start.y;
  if (!log.odom.empty()) {
    start = log.odom.front().pose;
    min_x = max_x = start.x;
    min_y = max_y = start.y;
    for (const OdomRecord& rec : log.odom) {
      min_x = std::min(min_x, rec.pose.x);
      max_x = std::max(max_x, rec.pose.x);
      min_y = std::min(min_y, rec.pose.y);
      max_y = std::max(max_y, rec.pose.y);
    }
  }
  const double margin = log.header.z_max + 2.0;
  geom::GridSpec grid;
  grid.resolution = config.resolution;
  grid.origin = {min_x - margin, min_y - margin, 0.0};
  grid.width_cells = static_cast<int>(
      std::ceil((max_x - min_x + 2.0 * margin) / grid.resolution));
  grid.height_cells = static_cast<int>(
      std::ceil((max_y - min_y + 2.0 * margin) / grid.resolution));

  rbpf::ParticleSet set;
  if (mode == rbpf::MapMode::kClam) {
    const crm::ConfidenceRichMap map(grid, config.map_bins);
    set = rbpf::init_particle_set(config.particles, start, map, config.seed);
  } else {
    const ogm::LogOddsMap map(grid);
    set = rbpf::init_particle_set(config.particles, start, map, config.seed);
  }

  std::vector<geom::Pose2D> reference_aligned = reference;
  if (!reference_aligned.empty() &&
      reference_aligned.size() != scans.size() + 1)
    throw std::domain_error("run_slam_log: reference length mismatch");

  SlamResult result =
      drive_filter(set, odometry, scans, reference_aligned, config, mode);
  if (!out_dir.empty()) export_slam_artifacts(out_dir, result, set, mode, config);
  return result;
}

ExploreResult run_explore(const RunConfig& config,
                          planner::InfoFunction info_function,
                          const std::string& out_dir) {
  const WorldParams world_params = world_params_from(config);
  const geom::Pose2D start = {config.world_width * 0.5,
                              config.world_height * 0.5, 0.0};

  // Initial mapping pass: a small known-pose loop around the start. A single
  // static scan cannot push expected occupancies across the sampleable
  // threshold (nearby unknown cells explain distant returns away), so the
  // robot circles its start location once before planning.
  const double bootstrap_radius = 1.6;
  std::vector<geom::Pose2D> bootstrap_poses;
  for (int i = 0; i < config.init_scans; ++i) {
    const double angle = 2.0 * geom::kPi * i / std::max(1, config.init_scans);
    bootstrap_poses.push_back({start.x + bootstrap_radius * std::cos(angle),
                               start.y + bootstrap_radius * std::sin(angle),
                               geom::wrap_angle(angle + 0.5 * geom::kPi)});
  }
  // The start clearance already covers the bootstrap circle; protecting the
  // circle poses themselves would erase nearby room walls.
  const GroundTruthWorld world =
      generate_world(world_params, std::span<const geom::Pose2D>(&start, 1));

  info::ScanGeometry geometry;
  geometry.n_z = config.n_z;
  geometry.fov = config.fov;
  const SensorNoise noise{config.sensor_sigma_range,
                          config.sensor_sigma_bearing};

  // Initial maps from spin scans at the start pose: successive scans rotate
  // by a fraction of the beam spacing so the fan fills in.
  crm::ConfidenceRichMap crm_map(world.grid, config.map_bins);
  ogm::LogOddsMap ogm_map(world.grid);
  const sensor::BeamModelParams beam = config.beam_params();
  for (std::size_t i = 0; i < bootstrap_poses.size(); ++i) {
    const geom::Pose2D& scan_pose = bootstrap_poses[i];
    std::mt19937_64 rng = rbpf::derive_rng(config.seed, i, 0, kPurposeScanNoise);
    for (int rep = 0; rep < 8; ++rep) {
      const sensor::Scan scan =
          simulate_scan(world, scan_pose, geometry, config.z_max, noise, rng);
      crm_map.integrate_scan(scan_pose, scan, beam);
      ogm_map.integrate_scan(scan_pose, scan, beam);
    }
  }

  // Start particle cloud: small spread around the start pose.
  rbpf::ParticleSet snapshot;
  snapshot.seed = config.seed;
  std::mt19937_64 spread_rng =
      rbpf::derive_rng(config.seed, 0, 0, kPurposeStartSpread);
  std::normal_distribution<double> gauss(0.0, 1.0);
  snapshot.particles.resize(config.thin_particles);
  for (auto& particle : snapshot.particles) {
    particle.pose = {start.x + 0.05 * gauss(spread_rng),
                     start.y + 0.05 * gauss(spread_rng),
                     geom::wrap_angle(start.theta + 0.02 * gauss(spread_rng))};
    particle.trajectory = {particle.pose};
  }

  planner::PlannerInputs inputs;
  inputs.crm_map = &crm_map;
  inputs.ogm_map = &ogm_map;
  inputs.geometry = geometry;
  inputs.beam = beam;
  inputs.info.outcome_bin = config.outcome_bin;
  inputs.info.alpha = config.alpha;
  inputs.info.normalized_entropy = config.normalized_entropy;
  inputs.odometry = config.odometry_params();
  inputs.start = snapshot;

  planner::PlannerConfig planner_config;
  planner_config.budget = config.budget;
  planner_config.ric_threshold = config.ric_threshold;
  planner_config.steer_step = config.steer;
  planner_config.window = config.window;
  planner_config.info_function = info_function;
  planner_config.seed = config.seed;
  planner_config.thin_particles = config.thin_particles;

  planner::IIGPlanner iig(inputs, planner_config);

  struct SeriesRow {
    int node;
    long samples;
    double i_ric;
    double cum_i_ric;
    double info;
    double tree_cost;
    double elapsed;
  };
  std::vector<SeriesRow> series;
  const auto t0 = Clock::now();
  double cum_i_ric = 0.0;
  double tree_cost = 0.0;
  while (!iig.has_converged() &&
         static_cast<int>(iig.tree().nodes.size()) < planner_config.max_nodes) {
    const std::optional<int> id = iig.sample_and_extend();
    if (!id) break;
    const planner::PlannerNode& node = iig.tree().nodes[*id];
    cum_i_ric += node.i_ric;
    tree_cost += node.edge_cost;
    series.push_back({node.id, iig.tree().total_samples, node.i_ric, cum_i_ric,
                      node.info, tree_cost, seconds_since(t0)});
  }

  ExploreResult result;
  result.tree = iig.tree();
  result.best_path = planner::best_path(result.tree);
  result.converged = iig.has_converged();
  result.wall_seconds = seconds_since(t0);
  for (const planner::PlannerNode& node : result.tree.nodes) {
    result.total_info += node.info;
    result.total_cost += node.edge_cost;
  }
  if (!result.best_path.empty()) {
    const planner::PlannerNode& leaf =
        result.tree.nodes[result.best_path.back()];
    result.best_path_info = leaf.cum_info;
    result.best_path_cost = leaf.cum_cost;
  }
  const std::span<const double> history = iig.i_ric_history();
  for (double v : history) result.mean_i_ric += v;
  if (!history.empty()) result.mean_i_ric /= static_cast<double>(history.size());

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    planner::write_tree_csv(result.tree, out_dir + "/tree.csv");
    planner::write_path_csv(result.tree, result.best_path,
                            out_dir + "/best_path.csv");
    crm::write_occupancy_pgm(crm_map, out_dir + "/initial_map.pgm");
    crm::write_entropy_csv(crm_map, out_dir + "/initial_entropy.csv",
                           inputs.info.normalized_entropy);
    write_world_pgm(world, out_dir + "/world.pgm");
    std::ofstream series_file(out_dir + "/series.csv");
    series_file.precision(17);
    series_file << "node,samples,i_ric,cum_i_ric,info,tree_cost,elapsed_s\n";
    for (const SeriesRow& row : series)
      series_file << row.node << ',' << row.samples << ',' << row.i_ric << ','
                  << row.cum_i_ric << ',' << row.info << ',' << row.tree_cost
                  << ',' << row.elapsed << '\n';

    nlohmann::json summary;
    summary["config"] = config_to_string(config);
    summary["info_function"] =
        info_function == planner::InfoFunction::kOgmi   ? "ogmi"
        : info_function == planner::InfoFunction::kCrmi ? "crmi"
                                                        : "ucrmi";
    summary["nodes"] = result.tree.nodes.size();
    summary["samples"] = result.tree.total_samples;
    summary["converged"] = result.converged;
    summary["total_info"] = result.total_info;
    summary["total_cost"] = result.total_cost;
    summary["best_path_info"] = result.best_path_info;
    summary["best_path_cost"] = result.best_path_cost;
    summary["mean_i_ric"] = result.mean_i_ric;
    summary["wall_seconds"] = result.wall_seconds;
    std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
  }
  return result;
}

void write_simulated_dataset(const RunConfig& config,
                             const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  WorldParams world_params = world_params_from(config);
  const double margin = loop_margin(config);
  if (config.corridor > 0.0) {
    world_params.ring_outer_margin = margin - 0.5 * config.corridor;
    world_params.ring_inner_margin = margin + 0.5 * config.corridor;
  }
  const std::vector<geom::Pose2D> truth =
      loop_trajectory(world_params, config.steps, margin);
  const GroundTruthWorld world = generate_world(world_params, truth);

  info::ScanGeometry geometry;
  geometry.n_z = config.n_z;
  geometry.fov = config.fov;
  const SensorNoise noise{config.sensor_sigma_range,
                          config.sensor_sigma_bearing};

  ScanLog log;
  log.header.fov = config.fov;
  log.header.z_max = config.z_max;
  log.header.n_z = config.n_z;

  geom::Pose2D odom_pose = truth[0];
  log.order.push_back(ScanLog::Kind::kOdom);
  log.odom.push_back({0.0, odom_pose});
  for (int k = 1; k < config.steps; ++k) {
    const double t = static_cast<double>(k);
    const rbpf::OdometryReading u_true =
        rbpf::OdometryReading::from_poses(truth[k - 1], truth[k]);
    std::mt19937_64 odom_rng =
        rbpf::derive_rng(config.seed, k, 0, kPurposeOdomNoise);
    const rbpf::OdometryReading u_noisy =
        corrupt_odometry(u_true, config.odometry_params(), odom_rng);
    odom_pose = geom::compose(odom_pose, u_noisy.as_delta());
    log.order.push_back(ScanLog::Kind::kOdom);
    log.odom.push_back({t, odom_pose});

    std::mt19937_64 scan_rng =
        rbpf::derive_rng(config.seed, k, 0, kPurposeScanNoise);
    const sensor::Scan scan = simulate_scan(world, truth[k], geometry,
                                            config.z_max, noise, scan_rng);
    ScanRecord rec;
    rec.t = t;
    for (const sensor::Beam& b : scan.beams) rec.ranges.push_back(b.range);
    log.order.push_back(ScanLog::Kind::kScan);
    log.scans.push_back(std::move(rec));
  }

  save_scan_log(log, out_dir + "/scan_log.txt");
  write_trajectory_csv(truth, out_dir + "/truth.csv");
  write_world_pgm(world, out_dir + "/world.pgm");
}

}  // namespace clam::harness
