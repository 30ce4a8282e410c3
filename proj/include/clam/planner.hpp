#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clam/crm.hpp"
#include "clam/geom.hpp"
#include "clam/info.hpp"
#include "clam/ogm.hpp"
#include "clam/rbpf.hpp"

namespace clam::planner {

enum class InfoFunction { kOgmi, kCrmi, kUcrmi, kGpvr /* not available */ };

struct PlannerNode {
  int id = 0;
  int parent = -1;            // -1 for the root
  geom::Pose2D pose;
  double edge_cost = 0.0;     // meters
  double cum_cost = 0.0;      // meters, root-to-node
  double info = 0.0;          // bits, information value at this node
  double cum_info = 0.0;      // bits, summed along the path from the root
  int n_sample = 0;           // samples drawn to find this node
  double ric = 0.0;           // I_new / I_near - 1
  double i_ric = 0.0;         // ric / n_sample
  double pose_cov_trace = 0.0;  // m^2, from the node's forward-simulated set
};

struct IIGTree {
  std::vector<PlannerNode> nodes;
  long total_samples = 0;
};

struct PlannerConfig {
  double budget = 1e3;            // meters, per-path cumulative cost bound
  double ric_threshold = 0.005;   // convergence threshold on mean I_RIC
  double steer_step = 1.0;        // meters
  int window = 30;                // accepted-node averaging window
  InfoFunction info_function = InfoFunction::kCrmi;
  std::uint64_t seed = 1;
  double free_threshold = 0.4;    // sampleable when expected occupancy below
  double occupied_threshold = 0.6;  // edges may not cross cells above
  int stall_limit = 3000;         // consecutive rejected samples before giving up
  int max_nodes = 5000;
  int thin_particles = 20;        // forward-simulation particle count
};

struct PlannerInputs {
  const crm::ConfidenceRichMap* crm_map = nullptr;  // kCrmi / kUcrmi
  const ogm::LogOddsMap* ogm_map = nullptr;         // kOgmi
  info::ScanGeometry geometry;
  sensor::BeamModelParams beam;
  info::InfoConfig info;
  rbpf::OdometryModelParams odometry;  // forward-simulation noise (kUcrmi)
  rbpf::ParticleSet start;             // root at estimate(start)
};

// True when the mean of the last `window` accepted-node I_RIC values falls
// strictly below the threshold; false while fewer values exist.
bool converged(std::span<const double> i_ric_history, int window,
               double threshold);

// Node maximizing cumulative path information; ties broken by lower
// cumulative cost, then lower id. Returns node ids root -> leaf.
std::vector<int> best_path(const IIGTree& tree);

class IIGPlanner {
 public:
  IIGPlanner(const PlannerInputs& inputs, const PlannerConfig& config);

  // Draws samples until one extends the tree: uniform free-space sample,
  // nearest node, one steer step, edge collision and budget checks. Returns
  // the accepted node id, or nullopt when the retry budget is exhausted.
  // Throws std::runtime_error when no free space can be sampled at all.
  std::optional<int> sample_and_extend();

  // Loops sample_and_extend until the I_RIC criterion fires or sampling
  // stalls or max_nodes is reached.
  void plan();

  bool has_converged() const;
  const IIGTree& tree() const { return tree_; }
  std::span<const double> i_ric_history() const { return i_ric_history_; }

 private:
  struct NodeBelief {
    std::vector<geom::Pose2D> poses;
    std::vector<double> weights;  // normalized
    double entropy_bits = 0.0;
    bool has_entropy = false;  // false at the root: no incoming edge yet
  };

  double occupancy_at(double x, double y) const;
  double evaluate_info(const geom::Pose2D& pose, int parent_id,
                       NodeBelief* belief_out, double* cov_trace_out);
  bool edge_blocked(const geom::Pose2D& from, double bearing,
                    double length) const;

  PlannerInputs inputs_;
  PlannerConfig config_;
  IIGTree tree_;
  std::vector<NodeBelief> beliefs_;  // parallel to tree_ when kUcrmi
  std::vector<double> i_ric_history_;
  std::mt19937_64 rng_;
  int samples_since_accept_ = 0;
};

void write_tree_csv(const IIGTree& tree, const std::string& path);
void write_path_csv(const IIGTree& tree, std::span<const int> path_ids,
                    const std::string& path);

}  // namespace clam::planner
