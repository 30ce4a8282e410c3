#include "clam/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace clam::planner {

namespace {
constexpr std::uint64_t kPurposeSample = 100;
constexpr std::uint64_t kPurposeEdgeMotion = 101;
constexpr std::uint64_t kPurposeEdgeResample = 102;
}  // namespace

bool converged(std::span<const double> i_ric_history, int window,
               double threshold) {
  if (static_cast<int>(i_ric_history.size()) < window || window <= 0)
    return false;
  double sum = 0.0;
  for (std::size_t k = i_ric_history.size() - window; k < i_ric_history.size();
       ++k)
    sum += i_ric_history[k];
  return sum / window < threshold;
}

std::vector<int> best_path(const IIGTree& tree) {
  if (tree.nodes.empty()) return {};
  int best = 0;
  for (const PlannerNode& node : tree.nodes) {
    const PlannerNode& incumbent = tree.nodes[best];
    if (node.cum_info > incumbent.cum_info ||
        (node.cum_info == incumbent.cum_info &&
         (node.cum_cost < incumbent.cum_cost ||
          (node.cum_cost == incumbent.cum_cost && node.id < incumbent.id))))
      best = node.id;
  }
  std::vector<int> path;
  for (int id = best; id != -1; id = tree.nodes[id].parent) path.push_back(id);
  std::reverse(path.begin(), path.end());
  return path;
}

IIGPlanner::IIGPlanner(const PlannerInputs& inputs, const PlannerConfig& config)
    : inputs_(inputs),
      config_(config),
      rng_(rbpf::derive_rng(config.seed, 0, 0, kPurposeSample)) {
  if (config_.info_function == InfoFunction::kGpvr)
    throw std::domain_error("GPVR information function is not available");
  const bool needs_crm = config_.info_function != InfoFunction::kOgmi;
  if (needs_crm && inputs_.crm_map == nullptr)
    throw std::domain_error("planner: CRM map required for this info function");
  if (!needs_crm && inputs_.ogm_map == nullptr)
    throw std::domain_error("planner: log-odds map required for OGMI");

  PlannerNode root;
  root.id = 0;
  root.pose = rbpf::estimate(inputs_.start);
  NodeBelief root_belief;
  double cov_trace = 0.0;
  root.info = evaluate_info(root.pose, -1, &root_belief, &cov_trace);
  root.cum_info = root.info;
  root.pose_cov_trace = cov_trace;
  tree_.nodes.push_back(root);
  beliefs_.push_back(std::move(root_belief));
}

double IIGPlanner::occupancy_at(double x, double y) const {
  if (config_.info_function == InfoFunction::kOgmi) {
    const geom::GridSpec& g = inputs_.ogm_map->grid();
    if (!g.contains(x, y)) return 1.0;
    return inputs_.ogm_map->occupancy(g.cell_at(x, y));
  }
  const geom::GridSpec& g = inputs_.crm_map->grid();
  if (!g.contains(x, y)) return 1.0;
  return inputs_.crm_map->expected_occupancy(g.cell_at(x, y));
}

bool IIGPlanner::edge_blocked(const geom::Pose2D& from, double bearing,
                              double length) const {
  const geom::GridSpec& g = config_.info_function == InfoFunction::kOgmi
                                ? inputs_.ogm_map->grid()
                                : inputs_.crm_map->grid();
  const geom::RayTrace trace = geom::trace_ray(g, from, bearing, length);
  for (int cell : trace.cells) {
    const double occ = config_.info_function == InfoFunction::kOgmi
                           ? inputs_.ogm_map->occupancy(cell)
                           : inputs_.crm_map->expected_occupancy(cell);
    if (occ > config_.occupied_threshold) return true;
  }
  return false;
}

double IIGPlanner::evaluate_info(const geom::Pose2D& pose, int parent_id,
                                 NodeBelief* belief_out,
                                 double* cov_trace_out) {
  if (config_.info_function == InfoFunction::kOgmi) {
    *cov_trace_out = 0.0;
    return info::ogmi(*inputs_.ogm_map, pose, inputs_.geometry, inputs_.beam,
                      inputs_.info);
  }
  const double i_map = info::crmi(*inputs_.crm_map, pose, inputs_.geometry,
                                  inputs_.beam, inputs_.info);
  if (config_.info_function == InfoFunction::kCrmi) {
    *cov_trace_out = 0.0;
    return i_map;
  }

  // UCRMI: forward-simulate the thinned particle set along the edge and
  // score the pose-entropy change alongside the map information.
  const int node_id = static_cast<int>(tree_.nodes.size());
  const sensor::Scan virtual_scan =
      info::predicted_scan(*inputs_.crm_map, pose, inputs_.geometry,
                           inputs_.beam);
  NodeBelief next;
  double i_pose = 0.0;
  if (parent_id < 0) {
    // Root: thin the start snapshot. The entropy recursion starts on the
    // first edge (where it reports zero gain), so no root entropy exists.
    const std::vector<double> w = rbpf::normalized_weights(inputs_.start);
    const std::vector<int> picks = rbpf::systematic_resample_indices(
        w, config_.thin_particles, 0.5 / config_.thin_particles);
    for (int idx : picks)
      next.poses.push_back(inputs_.start.particles[idx].pose);
    next.weights.assign(next.poses.size(), 1.0 / next.poses.size());
  } else {
    const NodeBelief& parent = beliefs_[parent_id];
    const rbpf::OdometryReading u = rbpf::OdometryReading::from_poses(
        tree_.nodes[parent_id].pose, pose);
    const std::size_t n = parent.poses.size();
    next.poses.resize(n);
    std::vector<double> meas(n), log_w(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::mt19937_64 rng = rbpf::derive_rng(config_.seed, node_id, j,
                                             kPurposeEdgeMotion);
      next.poses[j] = rbpf::sample_motion(parent.poses[j], u, inputs_.odometry,
                                          rng);
      meas[j] = rbpf::measurement_log_likelihood_crm(
          *inputs_.crm_map, next.poses[j], virtual_scan, inputs_.beam);
      log_w[j] = std::log(std::max(parent.weights[j], 1e-300)) + meas[j];
    }
    double max_log = *std::max_element(log_w.begin(), log_w.end());
    double sum = 0.0;
    for (double lw : log_w) sum += std::exp(lw - max_log);
    next.weights.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      next.weights[j] = std::exp(log_w[j] - max_log) / sum;

    const double h = info::pose_entropy_bayes(parent.poses, parent.weights,
                                              next.poses, next.weights, u,
                                              inputs_.odometry, meas);
    // Gains are differences of consecutive edge entropies; the first edge
    // seeds the recursion and contributes no gain of its own.
    i_pose = parent.has_entropy ? info::pose_info_gain(parent.entropy_bits, h)
                                : 0.0;
    next.entropy_bits = h;
    next.has_entropy = true;

    double sum_sq = 0.0;
    for (double wj : next.weights) sum_sq += wj * wj;
    if (1.0 / sum_sq < n / 2.0) {
      std::mt19937_64 rng = rbpf::derive_rng(config_.seed, node_id, 0,
                                             kPurposeEdgeResample);
      std::uniform_real_distribution<double> offset(0.0, 1.0 / n);
      const std::vector<int> picks =
          rbpf::systematic_resample_indices(next.weights,
                                            static_cast<int>(n), offset(rng));
      std::vector<geom::Pose2D> poses(n);
      for (std::size_t j = 0; j < n; ++j) poses[j] = next.poses[picks[j]];
      next.poses = std::move(poses);
      next.weights.assign(n, 1.0 / n);
    }
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < next.poses.size(); ++j) {
    mx += next.weights[j] * next.poses[j].x;
    my += next.weights[j] * next.poses[j].y;
  }
  double var = 0.0;
  for (std::size_t j = 0; j < next.poses.size(); ++j) {
    const double dx = next.poses[j].x - mx;
    const double dy = next.poses[j].y - my;
    var += next.weights[j] * (dx * dx + dy * dy);
  }
  *cov_trace_out = var;
  *belief_out = std::move(next);
  return info::ucrmi(i_map, i_pose, inputs_.info.alpha).i_combined;
}

std::optional<int> IIGPlanner::sample_and_extend() {
  const geom::GridSpec& g = config_.info_function == InfoFunction::kOgmi
                                ? inputs_.ogm_map->grid()
                                : inputs_.crm_map->grid();
  std::uniform_real_distribution<double> ux(
      g.origin.x, g.origin.x + g.width_cells * g.resolution);
  std::uniform_real_distribution<double> uy(
      g.origin.y, g.origin.y + g.height_cells * g.resolution);

  bool found_free = false;
  for (int attempt = 0; attempt < config_.stall_limit; ++attempt) {
    ++tree_.total_samples;
    ++samples_since_accept_;
    const double sx = ux(rng_);
    const double sy = uy(rng_);
    if (occupancy_at(sx, sy) >= config_.free_threshold) continue;
    found_free = true;

    int near = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (const PlannerNode& node : tree_.nodes) {
      const double dx = sx - node.pose.x;
      const double dy = sy - node.pose.y;
      const double sq = dx * dx + dy * dy;
      if (sq < best_sq) {
        best_sq = sq;
        near = node.id;
      }
    }
    const double dist = std::sqrt(best_sq);
    if (dist < 1e-9) continue;

    // Fixed-length extensions toward the sample: pose-entropy differences
    // are only comparable across edges of equal motion scale.
    const PlannerNode& near_node = tree_.nodes[near];
    const double length = config_.steer_step;
    if (near_node.cum_cost + length > config_.budget) continue;
    const double bearing = std::atan2(sy - near_node.pose.y,
                                      sx - near_node.pose.x);
    const geom::Pose2D new_pose = {near_node.pose.x + length * std::cos(bearing),
                                   near_node.pose.y + length * std::sin(bearing),
                                   bearing};
    if (occupancy_at(new_pose.x, new_pose.y) > config_.occupied_threshold)
      continue;
    if (edge_blocked(near_node.pose, bearing, length)) continue;

    PlannerNode node;
    node.id = static_cast<int>(tree_.nodes.size());
    node.parent = near;
    node.pose = new_pose;
    node.edge_cost = length;
    node.cum_cost = near_node.cum_cost + length;
    NodeBelief belief;
    node.info = evaluate_info(new_pose, near, &belief, &node.pose_cov_trace);
    node.cum_info = near_node.cum_info + node.info;
    node.n_sample = samples_since_accept_;
    samples_since_accept_ = 0;
    // Relative contribution is meaningless against a non-informative
    // parent; such ratios are reported as zero.
    node.ric = near_node.info > 1e-12 ? node.info / near_node.info - 1.0
                                      : 0.0;
    node.i_ric = node.ric / node.n_sample;
    tree_.nodes.push_back(node);
    beliefs_.push_back(std::move(belief));
    i_ric_history_.push_back(node.i_ric);
    return node.id;
  }
  if (!found_free)
    throw std::runtime_error("planner stall: no free space to sample");
  return std::nullopt;
}

bool IIGPlanner::has_converged() const {
  return converged(i_ric_history_, config_.window, config_.ric_threshold);
}

void IIGPlanner::plan() {
  while (!has_converged() &&
         static_cast<int>(tree_.nodes.size()) < config_.max_nodes) {
    if (!sample_and_extend()) break;
  }
}

void write_tree_csv(const IIGTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "id,parent,x,y,theta,edge_cost,cum_cost,info,cum_info,n_sample,i_ric\n";
  for (const PlannerNode& n : tree.nodes)
    out << n.id << ',' << n.parent << ',' << n.pose.x << ',' << n.pose.y << ','
        << n.pose.theta << ',' << n.edge_cost << ',' << n.cum_cost << ','
        << n.info << ',' << n.cum_info << ',' << n.n_sample << ',' << n.i_ric
        << '\n';
}

void write_path_csv(const IIGTree& tree, std::span<const int> path_ids,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "id,x,y,theta,cum_cost,cum_info\n";
  for (int id : path_ids) {
    const PlannerNode& n = tree.nodes[id];
    out << n.id << ',' << n.pose.x << ',' << n.pose.y << ',' << n.pose.theta
        << ',' << n.cum_cost << ',' << n.cum_info << '\n';
  }
}

}  // namespace clam::planner
