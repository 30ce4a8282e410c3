#pragma once

#include <span>
#include <vector>

#include "clam/crm.hpp"
#include "clam/geom.hpp"
#include "clam/ogm.hpp"
#include "clam/rbpf.hpp"
#include "clam/sensor.hpp"

namespace clam::info {

// Uniform beam fan used when evaluating candidate poses.
struct ScanGeometry {
  int n_z = 10;
  double fov = 2.0 * geom::kPi;
  geom::Pose2D sensor_offset;
};

struct InfoConfig {
  double outcome_bin = 0.1;        // meters; measurement-outcome discretization
  double alpha = 0.5;              // UCRMI mixing constant
  bool normalized_entropy = false; // divide cell entropies by log2(bins) in exports
};

struct InfoScore {
  double i_map = 0.0;       // bits
  double i_pose = 0.0;      // bits
  double i_combined = 0.0;  // bits
};

// Expected mutual information between a future scan from `pose` and the
// confidence-rich map: per beam, measurement outcomes are enumerated on the
// outcome_bin grid (plus the max-range atom) and each traversed cell's
// belief update is simulated per outcome. Throws std::domain_error if the
// sensor pose is outside the grid.
double crmi(const crm::ConfidenceRichMap& map, const geom::Pose2D& pose,
            const ScanGeometry& geometry, const sensor::BeamModelParams& params,
            const InfoConfig& config);

// Same outcome enumeration against the log-odds baseline map, with per-cell
// Bernoulli beliefs.
double ogmi(const ogm::LogOddsMap& map, const geom::Pose2D& pose,
            const ScanGeometry& geometry, const sensor::BeamModelParams& params,
            const InfoConfig& config);

// Weights-only pose entropy (bits). Degenerates after resampling; kept for
// comparison.
double pose_entropy_naive(std::span<const double> normalized_weights);
double pose_entropy_naive(const rbpf::ParticleSet& set);

// Particle approximation of the pose belief entropy in a Bayesian form:
//   H ~= -sum_j w_k^j log2( p(z|s_k^j) * sum_j' p(s_k^j'|s_{k-1}^j') w_{k-1}^j' )
//        + log2( sum_j p(z|s_k^j) w_k^j )
// `meas_log_lik[j]` is the natural-log measurement likelihood of particle j
// at its propagated pose. Throws std::runtime_error when every measurement
// likelihood is zero.
double pose_entropy_bayes(std::span<const geom::Pose2D> prev_poses,
                          std::span<const double> prev_weights,
                          std::span<const geom::Pose2D> curr_poses,
                          std::span<const double> curr_weights,
                          const rbpf::OdometryReading& u,
                          const rbpf::OdometryModelParams& motion,
                          std::span<const double> meas_log_lik);

// Convenience overload: set_curr must be the one-step successor of set_prev
// (same particle order, weights already updated, maps not yet resampled);
// measurement likelihoods are evaluated against each particle's own map.
double pose_entropy_bayes(const rbpf::ParticleSet& set_prev,
                          const rbpf::ParticleSet& set_curr,
                          const rbpf::OdometryReading& u,
                          const sensor::Scan& scan,
                          const rbpf::OdometryModelParams& motion,
                          const sensor::BeamModelParams& beam);

// Trajectory information gain between consecutive steps; may be negative.
double pose_info_gain(double h_prev_bits, double h_curr_bits);

// I_c = alpha * I_m + (1 - alpha) * I_p. Throws std::domain_error for alpha
// outside [0, 1].
InfoScore ucrmi(double i_map, double i_pose, double alpha);

// Maximum-likelihood virtual scan: per beam, range to the first cell whose
// expected occupancy exceeds 0.5, else max range.
sensor::Scan predicted_scan(const crm::ConfidenceRichMap& map,
                            const geom::Pose2D& pose,
                            const ScanGeometry& geometry,
                            const sensor::BeamModelParams& params);

}  // namespace clam::info
