#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <filesystem>
#include <string>
#include <vector>

#include "clam/config.hpp"
#include "clam/experiments.hpp"
#include "clam/metrics.hpp"
#include "clam/scan_log.hpp"
#include "clam/world.hpp"

using namespace clam;
using harness::RunConfig;
using harness::ScanLog;

namespace {

ScanLog sample_log() {
  ScanLog log;
  log.header.fov = 2.0 * geom::kPi;
  log.header.z_max = 5.0;
  log.header.n_z = 4;
  log.header.sensor_offset = {0.05, 0.0, 0.0};
  log.order = {ScanLog::Kind::kOdom, ScanLog::Kind::kScan,
               ScanLog::Kind::kOdom, ScanLog::Kind::kScan};
  log.odom.push_back({0.0, {1.0, 2.0, 0.1}});
  log.odom.push_back({1.0, {1.2, 2.05, 0.15}});
  log.scans.push_back({0.5, {1.0, 2.0, 3.0, 5.0}});
  log.scans.push_back({1.5, {1.1, 2.1, 2.9, 4.7}});
  return log;
}

std::string write_temp(const std::string& body) {
  const std::string path = "/tmp/clam_test_log.txt";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("scan log round trip is lossless") {
  const ScanLog log = sample_log();
  const std::string path = "/tmp/clam_roundtrip_log.txt";
  harness::save_scan_log(log, path);
  const ScanLog loaded = harness::load_scan_log(path);
  CHECK(loaded.header.fov == log.header.fov);
  CHECK(loaded.header.z_max == log.header.z_max);
  CHECK(loaded.header.n_z == log.header.n_z);
  CHECK(loaded.header.sensor_offset.x == log.header.sensor_offset.x);
  REQUIRE(loaded.order.size() == log.order.size());
  for (std::size_t i = 0; i < log.order.size(); ++i)
    CHECK(loaded.order[i] == log.order[i]);
  for (std::size_t i = 0; i < log.odom.size(); ++i) {
    CHECK(loaded.odom[i].t == log.odom[i].t);
    CHECK(loaded.odom[i].pose.x == log.odom[i].pose.x);
    CHECK(loaded.odom[i].pose.theta == log.odom[i].pose.theta);
  }
  for (std::size_t i = 0; i < log.scans.size(); ++i)
    for (std::size_t l = 0; l < log.scans[i].ranges.size(); ++l)
      CHECK(loaded.scans[i].ranges[l] == log.scans[i].ranges[l]);
  std::remove(path.c_str());
}

TEST_CASE("header-only log is valid and empty") {
  const std::string path =
      write_temp("# comment\nHEADER fov 6.28 zmax 5 nz 3 offset 0 0 0\n");
  const ScanLog log = harness::load_scan_log(path);
  CHECK(log.order.empty());
  CHECK(log.header.n_z == 3);
  std::remove(path.c_str());
}

TEST_CASE("scan arity errors name the line") {
  const std::string path = write_temp(
      "HEADER fov 6.28 zmax 5 nz 3 offset 0 0 0\n"
      "SCAN 0.0 1.0 2.0\n");
  try {
    harness::load_scan_log(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find(":2:") != std::string::npos);
    CHECK(what.find("expected 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("malicious logs are rejected") {
  CHECK_THROWS(harness::load_scan_log(
      write_temp("ODOM 0 0 0 0\nHEADER fov 6.28 zmax 5 nz 3 offset 0 0 0\n")));
  CHECK_THROWS(harness::load_scan_log(write_temp(
      "HEADER fov 6.28 zmax 5 nz 2 offset 0 0 0\nSCAN 0.0 1.0 9.0\n")));
  CHECK_THROWS(harness::load_scan_log(write_temp(
      "HEADER fov 6.28 zmax 5 nz 2 offset 0 0 0\nODOM 2 0 0 0\nODOM 1 0 0 0\n")));
  CHECK_THROWS(harness::load_scan_log(write_temp(
      "HEADER fov 6.28 zmax 5 nz 2 offset 0 0 0\nWHAT 1 2 3\n")));
  std::remove("/tmp/clam_test_log.txt");
}

TEST_CASE("relative odometry matches pose differences") {
  const ScanLog log = sample_log();
  const auto readings = harness::relative_odometry(log);
  REQUIRE(readings.size() == 1);
  const geom::Pose2D back =
      geom::compose(log.odom[0].pose, readings[0].as_delta());
  CHECK(back.x == doctest::Approx(log.odom[1].pose.x).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(log.odom[1].pose.y).epsilon(1e-12));
  CHECK(std::abs(geom::wrap_angle(back.theta - log.odom[1].pose.theta)) <
        1e-12);
}

TEST_CASE("simulated scans respect geometry, clamping, and noise") {
  harness::WorldParams params;
  params.width_m = 10.0;
  params.height_m = 10.0;
  params.clutter_count = 0;
  params.wall_count = 0;
  const harness::GroundTruthWorld world = harness::generate_world(params);

  info::ScanGeometry geometry;
  geometry.n_z = 1;
  geometry.fov = 0.1;

  // Zero noise: wall 2.0 m ahead (border wall cells start at x = 9.8).
  std::mt19937_64 rng(1);
  const harness::SensorNoise no_noise{0.0, 0.0};
  const sensor::Scan scan = harness::simulate_scan(
      world, {7.8, 5.0, 0.0}, geometry, 5.0, no_noise, rng);
  REQUIRE(scan.beams.size() == 1);
  CHECK(std::abs(scan.beams[0].range - 2.0) <= 0.1 + 1e-9);

  // Open space beyond the range limit returns exactly z_max.
  const sensor::Scan open = harness::simulate_scan(
      world, {5.0, 5.0, 0.0}, geometry, 3.0, no_noise, rng);
  CHECK(open.beams[0].range == 3.0);

  // Pose inside an occupied cell is rejected.
  CHECK_THROWS_AS(harness::simulate_scan(world, {0.1, 0.1, 0.0}, geometry, 3.0,
                                         no_noise, rng),
                  std::domain_error);

  // Range noise statistics match the configured sigma within 5 percent.
  const harness::SensorNoise noisy{0.01, 0.0};
  std::mt19937_64 noise_rng(7);
  std::vector<double> samples;
  for (int i = 0; i < 10000; ++i) {
    const sensor::Scan s = harness::simulate_scan(world, {7.8, 5.0, 0.0},
                                                  geometry, 5.0, noisy,
                                                  noise_rng);
    samples.push_back(s.beams[0].range);
  }
  double mean = 0.0;
  for (double r : samples) mean += r;
  mean /= samples.size();
  double var = 0.0;
  for (double r : samples) var += (r - mean) * (r - mean);
  var /= samples.size() - 1;
  CHECK(std::sqrt(var) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("loop trajectory stays clear of generated clutter") {
  harness::WorldParams params;
  params.width_m = 20.0;
  params.height_m = 20.0;
  params.clutter_count = 30;
  params.wall_count = 2;
  params.seed = 4;
  const std::vector<geom::Pose2D> loop = harness::loop_trajectory(params, 120);
  const harness::GroundTruthWorld world = harness::generate_world(params, loop);
  REQUIRE(loop.size() == 120);
  for (const geom::Pose2D& pose : loop)
    CHECK_FALSE(world.occupied_at(pose.x, pose.y));
}

TEST_CASE("metrics identities") {
  std::vector<geom::Pose2D> ref = {{0, 0, 0}, {1, 0, 0.4}, {2, 0, -0.4}};
  CHECK(harness::compute_metrics(ref, ref).avg_rmse == 0.0);
  CHECK(harness::compute_metrics(ref, ref).mae_theta == 0.0);

  std::vector<geom::Pose2D> offset = ref;
  for (auto& p : offset) p.x += 1.0;
  const harness::Metrics m = harness::compute_metrics(offset, ref);
  CHECK(m.mae_x == doctest::Approx(1.0));
  CHECK(m.mae_y == 0.0);
  CHECK(m.avg_rmse == doctest::Approx(1.0));
  CHECK(m.position_error.size() == 3);

  // Heading errors use wrapped magnitudes.
  std::vector<geom::Pose2D> wrap_ref = {{0, 0, geom::kPi - 0.05}};
  std::vector<geom::Pose2D> wrap_est = {{0, 0, -geom::kPi + 0.05}};
  CHECK(harness::compute_metrics(wrap_est, wrap_ref).mae_theta ==
        doctest::Approx(0.1).epsilon(1e-9));

  std::vector<geom::Pose2D> shorter = {{0, 0, 0}};
  CHECK_THROWS_AS(harness::compute_metrics(shorter, ref), std::domain_error);
}

TEST_CASE("trajectory csv round trip") {
  const std::vector<geom::Pose2D> traj = {{0.125, -3.5, 0.7},
                                          {1.0 / 3.0, 2.25, -1.1}};
  harness::write_trajectory_csv(traj, "/tmp/clam_traj.csv");
  const std::vector<geom::Pose2D> loaded =
      harness::load_trajectory_csv("/tmp/clam_traj.csv");
  REQUIRE(loaded.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(loaded[i].x == traj[i].x);
    CHECK(loaded[i].y == traj[i].y);
    CHECK(loaded[i].theta == traj[i].theta);
  }
  std::remove("/tmp/clam_traj.csv");
}

TEST_CASE("config files override defaults and reject junk") {
  RunConfig config;
  const std::string path = "/tmp/clam_config.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "seed 42\n";
    out << "alpha = 0.25\n";
    out << "particles 7   # trailing comment\n";
  }
  harness::apply_config_file(config, path);
  CHECK(config.seed == 42);
  CHECK(config.alpha == 0.25);
  CHECK(config.particles == 7);
  std::remove(path.c_str());

  CHECK_THROWS(harness::apply_config_value(config, "bogus_key", "1"));
  CHECK_THROWS(harness::apply_config_value(config, "alpha", "not_a_number"));

  RunConfig a, b;
  CHECK(harness::config_hash(a) == harness::config_hash(b));
  b.seed = 1234;
  CHECK(harness::config_hash(a) != harness::config_hash(b));
}

TEST_CASE("noiseless single-particle slam reproduces the truth") {
  RunConfig config = harness::slam_defaults();
  config.world_width = 20.0;
  config.world_height = 20.0;
  config.clutter = 6;
  config.steps = 30;
  config.particles = 1;
  config.n_z = 8;
  config.alpha1 = config.alpha2 = config.alpha3 = config.alpha4 = 0.0;
  config.sensor_sigma_range = 0.0;
  config.sensor_sigma_bearing = 0.0;
  const harness::SlamResult result =
      harness::run_slam(config, rbpf::MapMode::kClam);
  CHECK(result.metrics.mae_x <= 1e-9);
  CHECK(result.metrics.mae_y <= 1e-9);
  CHECK(result.metrics.mae_theta <= 1e-9);
  CHECK(result.metrics.avg_rmse <= 1e-9);
}

TEST_CASE("slam runs are deterministic in both modes") {
  RunConfig config = harness::slam_defaults();
  config.world_width = 16.0;
  config.world_height = 16.0;
  config.clutter = 8;
  config.steps = 40;
  config.particles = 12;
  config.n_z = 6;
  for (rbpf::MapMode mode : {rbpf::MapMode::kClam, rbpf::MapMode::kOgm}) {
    const harness::SlamResult a = harness::run_slam(config, mode);
    const harness::SlamResult b = harness::run_slam(config, mode);
    REQUIRE(a.estimated.size() == b.estimated.size());
    for (std::size_t k = 0; k < a.estimated.size(); ++k) {
      CHECK(a.estimated[k].x == b.estimated[k].x);
      CHECK(a.estimated[k].y == b.estimated[k].y);
      CHECK(a.estimated[k].theta == b.estimated[k].theta);
    }
  }
}

TEST_CASE("slam writes its artifact set") {
  RunConfig config = harness::slam_defaults();
  config.world_width = 16.0;
  config.world_height = 16.0;
  config.steps = 36;
  config.particles = 5;
  config.n_z = 5;
  const std::string dir = "/tmp/clam_slam_run";
  harness::run_slam(config, rbpf::MapMode::kClam, dir);
  CHECK(std::ifstream(dir + "/estimated.csv").good());
  CHECK(std::ifstream(dir + "/reference.csv").good());
  CHECK(std::ifstream(dir + "/map.pgm").good());
  CHECK(std::ifstream(dir + "/summary.json").good());
  CHECK(std::ifstream(dir + "/world.pgm").good());
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulated dataset replays through the log path") {
  RunConfig config = harness::slam_defaults();
  config.world_width = 16.0;
  config.world_height = 16.0;
  config.steps = 36;
  config.particles = 4;
  config.n_z = 5;
  const std::string dir = "/tmp/clam_dataset";
  harness::write_simulated_dataset(config, dir);
  const ScanLog log = harness::load_scan_log(dir + "/scan_log.txt");
  CHECK(log.scans.size() == 35);
  CHECK(log.odom.size() == 36);
  const std::vector<geom::Pose2D> truth =
      harness::load_trajectory_csv(dir + "/truth.csv");
  REQUIRE(truth.size() == 36);
  const harness::SlamResult replay =
      harness::run_slam_log(log, config, rbpf::MapMode::kClam, truth);
  CHECK(replay.estimated.size() == truth.size());
  CHECK(replay.metrics.avg_rmse < 5.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("budget-zero exploration returns the lone root") {
  RunConfig config;  // exploration defaults
  config.budget = 0.0;
  config.steps = 10;
  const harness::ExploreResult result =
      harness::run_explore(config, planner::InfoFunction::kCrmi);
  CHECK(result.tree.nodes.size() == 1);
  CHECK(result.total_cost == 0.0);
  CHECK(result.best_path == std::vector<int>{0});
  CHECK_FALSE(result.converged);
}

TEST_CASE("exploration runs deterministically and writes artifacts") {
  RunConfig config;
  config.seed = 6;
  config.n_z = 6;
  config.window = 8;
  config.ric_threshold = 0.02;
  config.clutter = 8;
  const std::string dir = "/tmp/clam_explore_run";
  const harness::ExploreResult a =
      harness::run_explore(config, planner::InfoFunction::kCrmi, dir);
  const harness::ExploreResult b =
      harness::run_explore(config, planner::InfoFunction::kCrmi);
  CHECK(a.tree.nodes.size() == b.tree.nodes.size());
  CHECK(a.tree.total_samples == b.tree.total_samples);
  CHECK(a.total_info == b.total_info);
  CHECK(std::ifstream(dir + "/tree.csv").good());
  CHECK(std::ifstream(dir + "/best_path.csv").good());
  CHECK(std::ifstream(dir + "/series.csv").good());
  CHECK(std::ifstream(dir + "/summary.json").good());
  CHECK(std::ifstream(dir + "/initial_map.pgm").good());
  std::filesystem::remove_all(dir);
}
