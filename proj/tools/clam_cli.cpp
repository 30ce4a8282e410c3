#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clam/config.hpp"
#include "clam/experiments.hpp"
#include "clam/metrics.hpp"
#include "clam/scan_log.hpp"

namespace {

using clam::harness::RunConfig;

struct CommonArgs {
  std::string config_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> particles;
  std::optional<double> alpha;
  std::optional<int> map_bins;
  std::optional<double> outcome_bin;
  std::optional<double> ric_threshold;
  std::optional<double> budget;
  std::optional<int> n_z;
  std::optional<double> z_max;
  std::optional<int> steps;
  std::optional<double> z_hit, z_short, z_max_weight, z_rand;
  std::optional<double> sigma_hit, lambda_short;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file,
                  "plain-text key-value config file");
  cmd->add_option("--out", args.out_dir,
                  "output directory (default runs/<hash>-s<seed>)");
  cmd->add_option("--seed", args.seed, "master random seed");
  cmd->add_option("--particles", args.particles, "particle count");
  cmd->add_option("--alpha", args.alpha, "UCRMI mixing constant in [0,1]");
  cmd->add_option("--bins", args.map_bins, "occupancy belief bins per cell");
  cmd->add_option("--zres", args.outcome_bin,
                  "measurement outcome bin width (m)");
  cmd->add_option("--ric-eps", args.ric_threshold,
                  "planner convergence threshold on mean I_RIC");
  cmd->add_option("--budget", args.budget, "planner path cost budget (m)");
  cmd->add_option("--beams", args.n_z, "beams per scan");
  cmd->add_option("--zmax", args.z_max, "max sensing range (m)");
  cmd->add_option("--steps", args.steps, "trajectory steps");
  cmd->add_option("--z-hit", args.z_hit, "beam model hit weight");
  cmd->add_option("--z-short", args.z_short, "beam model short weight");
  cmd->add_option("--z-max-weight", args.z_max_weight,
                  "beam model max-range weight");
  cmd->add_option("--z-rand", args.z_rand, "beam model random weight");
  cmd->add_option("--sigma-hit", args.sigma_hit, "hit component sigma (m)");
  cmd->add_option("--lambda-short", args.lambda_short,
                  "short component decay rate");
}

RunConfig resolve_config(const RunConfig& defaults, const CommonArgs& args) {
  RunConfig config = defaults;
  if (!args.config_file.empty())
    clam::harness::apply_config_file(config, args.config_file);
  if (args.seed) config.seed = *args.seed;
  if (args.particles) config.particles = *args.particles;
  if (args.alpha) config.alpha = *args.alpha;
  if (args.map_bins) config.map_bins = *args.map_bins;
  if (args.outcome_bin) config.outcome_bin = *args.outcome_bin;
  if (args.ric_threshold) config.ric_threshold = *args.ric_threshold;
  if (args.budget) config.budget = *args.budget;
  if (args.n_z) config.n_z = *args.n_z;
  if (args.z_max) config.z_max = *args.z_max;
  if (args.steps) config.steps = *args.steps;
  if (args.z_hit) config.z_hit = *args.z_hit;
  if (args.z_short) config.z_short = *args.z_short;
  if (args.z_max_weight) config.z_max_weight = *args.z_max_weight;
  if (args.z_rand) config.z_rand = *args.z_rand;
  if (args.sigma_hit) config.sigma_hit = *args.sigma_hit;
  if (args.lambda_short) config.lambda_short = *args.lambda_short;
  return config;
}

std::string run_dir(const RunConfig& config, const std::string& requested) {
  if (!requested.empty()) return requested;
  return "runs/" + clam::harness::config_hash(config) + "-s" +
         std::to_string(config.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-rich localization, mapping, and exploration"};
  app.require_subcommand(1);

  CommonArgs sim_args, slam_args, explore_args;
  std::string slam_mode = "clam";
  std::string slam_log, slam_ref;
  std::string explore_info = "crmi";
  std::string eval_est, eval_ref;

  CLI::App* simulate =
      app.add_subcommand("simulate", "generate a world plus odometry/scan log");
  add_common_options(simulate, sim_args);

  CLI::App* slam = app.add_subcommand("slam", "run the particle filter");
  add_common_options(slam, slam_args);
  slam->add_option("--mode", slam_mode, "clam | ogm")
      ->check(CLI::IsMember({"clam", "ogm"}));
  slam->add_option("--log", slam_log,
                   "replay a recorded scan log instead of simulating");
  slam->add_option("--ref", slam_ref,
                   "reference trajectory CSV for metrics (with --log)");

  CLI::App* explore =
      app.add_subcommand("explore", "informative path planning evaluation");
  add_common_options(explore, explore_args);
  explore->add_option("--info", explore_info, "ogmi | crmi | ucrmi")
      ->check(CLI::IsMember({"ogmi", "crmi", "ucrmi"}));

  CLI::App* eval = app.add_subcommand("eval", "metrics from trajectory files");
  eval->add_option("--est", eval_est, "estimated trajectory CSV")->required();
  eval->add_option("--ref", eval_ref, "reference trajectory CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const RunConfig config =
          resolve_config(clam::harness::slam_defaults(), sim_args);
      const std::string dir = run_dir(config, sim_args.out_dir);
      clam::harness::write_simulated_dataset(config, dir);
      std::cout << "dataset written to " << dir << "\n";
    } else if (slam->parsed()) {
      const RunConfig config =
          resolve_config(clam::harness::slam_defaults(), slam_args);
      const auto mode = slam_mode == "clam" ? clam::rbpf::MapMode::kClam
                                            : clam::rbpf::MapMode::kOgm;
      const std::string dir = run_dir(config, slam_args.out_dir);
      clam::harness::SlamResult result;
      if (!slam_log.empty()) {
        const clam::harness::ScanLog log =
            clam::harness::load_scan_log(slam_log);
        std::vector<clam::geom::Pose2D> reference;
        if (!slam_ref.empty())
          reference = clam::harness::load_trajectory_csv(slam_ref);
        result = clam::harness::run_slam_log(log, config, mode, reference, dir);
      } else {
        result = clam::harness::run_slam(config, mode, dir);
      }
      std::cout << "slam (" << slam_mode << ") finished in "
                << result.wall_seconds << " s, outputs in " << dir << "\n";
      if (!result.reference.empty())
        std::cout << "  MAE x " << result.metrics.mae_x << " m, y "
                  << result.metrics.mae_y << " m, theta "
                  << result.metrics.mae_theta << " rad; avg RMSE "
                  << result.metrics.avg_rmse << " m\n";
    } else if (explore->parsed()) {
      const RunConfig config =
          resolve_config(clam::harness::explore_defaults(), explore_args);
      const auto info = explore_info == "ogmi"
                            ? clam::planner::InfoFunction::kOgmi
                            : explore_info == "crmi"
                                  ? clam::planner::InfoFunction::kCrmi
                                  : clam::planner::InfoFunction::kUcrmi;
      const std::string dir = run_dir(config, explore_args.out_dir);
      const clam::harness::ExploreResult result =
          clam::harness::run_explore(config, info, dir);
      std::cout << "explore (" << explore_info << "): "
                << result.tree.nodes.size() << " nodes, "
                << result.tree.total_samples << " samples, total info "
                << result.total_info << " bits, converged "
                << (result.converged ? "yes" : "no") << ", outputs in " << dir
                << "\n";
    } else if (eval->parsed()) {
      const auto est = clam::harness::load_trajectory_csv(eval_est);
      const auto ref = clam::harness::load_trajectory_csv(eval_ref);
      const clam::harness::Metrics m = clam::harness::compute_metrics(est, ref);
      std::cout << "MAE x " << m.mae_x << " m\nMAE y " << m.mae_y
                << " m\nMAE theta " << m.mae_theta << " rad\navg RMSE "
                << m.avg_rmse << " m\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
