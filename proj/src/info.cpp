#include "clam/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clam::info {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double m : p)
    if (m > 0.0) h -= m * std::log2(m);
  return h;
}

// Measurement outcome grid: interior bin centers plus the max-range atom.
struct OutcomeGrid {
  std::vector<double> value;    // z evaluated per outcome
  std::vector<double> measure;  // bin width; the atom carries its own mass
  std::size_t atom;             // index of the max-range outcome
};

OutcomeGrid make_outcomes(const sensor::BeamModelParams& params,
                          double outcome_bin) {
  if (!(outcome_bin > 0.0))
    throw std::domain_error("make_outcomes: outcome bin must be positive");
  OutcomeGrid grid;
  const int interior = std::max(
      1, static_cast<int>(std::floor(params.z_max_range / outcome_bin + 1e-9)));
  for (int k = 0; k < interior; ++k) {
    grid.value.push_back((k + 0.5) * outcome_bin);
    grid.measure.push_back(outcome_bin);
  }
  grid.value.push_back(params.z_max_range);
  grid.measure.push_back(outcome_bin);
  grid.atom = grid.value.size() - 1;
  return grid;
}

// Exact mutual information of the discrete channel raw[k][b] (outcome k,
// occupancy level b) with the given prior, computed in the entropy-reduction
// form: each column is normalized over outcomes so it is a proper
// conditional distribution, then I = sum_k p(k) (H(prior) - H(posterior_k)).
double cell_channel_mi(const std::vector<std::vector<double>>& raw,
                       std::span<const double> prior) {
  const std::size_t n_out = raw.size();
  const std::size_t n_lvl = prior.size();
  std::vector<double> col_norm(n_lvl, 0.0);
  for (std::size_t k = 0; k < n_out; ++k)
    for (std::size_t b = 0; b < n_lvl; ++b) col_norm[b] += raw[k][b];

  const double h_prior = entropy_bits(prior);
  if (h_prior <= 0.0) return 0.0;

  double mi = 0.0;
  std::vector<double> posterior(n_lvl);
  for (std::size_t k = 0; k < n_out; ++k) {
    double p_k = 0.0;
    for (std::size_t b = 0; b < n_lvl; ++b) {
      const double cond = col_norm[b] > 0.0 ? raw[k][b] / col_norm[b] : 0.0;
      posterior[b] = prior[b] * cond;
      p_k += posterior[b];
    }
    if (p_k <= 0.0) continue;
    for (double& q : posterior) q /= p_k;
    mi += p_k * (h_prior - entropy_bits(posterior));
  }
  return mi;
}

// Shared CRMI/OGMI core: walks every beam, and for every traversed cell
// builds the discretized outcome channel over the cell's occupancy levels
// from the affine beam likelihood.
template <typename OccupancyAt, typename CellLevels, typename CellPrior>
double expected_map_info(const geom::GridSpec& grid, const geom::Pose2D& pose,
                         const ScanGeometry& geometry,
                         const sensor::BeamModelParams& params,
                         const InfoConfig& config, OccupancyAt occupancy_at,
                         CellLevels levels_of, CellPrior prior_of) {
  const geom::Pose2D sensor_pose = geom::compose(pose, geometry.sensor_offset);
  if (!grid.contains(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("map info: sensor pose outside grid");

  const OutcomeGrid outcomes = make_outcomes(params, config.outcome_bin);
  const std::size_t n_out = outcomes.value.size();

  double total = 0.0;
  std::vector<double> occ;
  std::vector<sensor::BeamAffine> affine(n_out);
  for (double bearing : sensor::uniform_bearings(geometry.fov, geometry.n_z)) {
    const geom::RayTrace trace = geom::trace_ray(
        grid, sensor_pose, sensor_pose.theta + bearing, params.z_max_range);
    if (trace.empty()) continue;
    occ.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
      occ[i] = occupancy_at(trace.cells[i]);
    for (std::size_t k = 0; k < n_out; ++k)
      affine[k] = sensor::beam_affine(outcomes.value[k], trace, occ, params);

    for (std::size_t i = 0; i < trace.size(); ++i) {
      const std::span<const double> levels = levels_of(trace.cells[i]);
      const std::span<const double> prior = prior_of(trace.cells[i]);
      std::vector<std::vector<double>> raw(n_out,
                                           std::vector<double>(levels.size()));
      for (std::size_t k = 0; k < n_out; ++k) {
        for (std::size_t b = 0; b < levels.size(); ++b) {
          const double lik = std::max(
              0.0, affine[k].offset[i] + affine[k].slope[i] * levels[b]);
          if (k == outcomes.atom) {
            // The atom outcome carries the discrete z_max mass plus the
            // discretized continuous tail at z_max_range.
            const double cont = std::max(0.0, lik - params.z_max);
            raw[k][b] = params.z_max + cont * outcomes.measure[k];
          } else {
            raw[k][b] = lik * outcomes.measure[k];
          }
        }
      }
      total += cell_channel_mi(raw, prior);
    }
  }
  return total;
}

}  // namespace

double crmi(const crm::ConfidenceRichMap& map, const geom::Pose2D& pose,
            const ScanGeometry& geometry, const sensor::BeamModelParams& params,
            const InfoConfig& config) {
  thread_local std::vector<double> centers;
  centers.resize(map.bins());
  for (int b = 0; b < map.bins(); ++b) centers[b] = (b + 0.5) / map.bins();
  return expected_map_info(
      map.grid(), pose, geometry, params, config,
      [&](int cell) { return map.expected_occupancy(cell); },
      [&](int) { return std::span<const double>(centers); },
      [&](int cell) { return std::span<const double>(map.belief(cell).mass); });
}

double ogmi(const ogm::LogOddsMap& map, const geom::Pose2D& pose,
            const ScanGeometry& geometry, const sensor::BeamModelParams& params,
            const InfoConfig& config) {
  static constexpr double kLevels[2] = {0.0, 1.0};
  thread_local std::vector<double> bernoulli(2);
  return expected_map_info(
      map.grid(), pose, geometry, params, config,
      [&](int cell) { return map.occupancy(cell); },
      [&](int) { return std::span<const double>(kLevels, 2); },
      [&](int cell) {
        bernoulli[0] = 1.0 - map.occupancy(cell);
        bernoulli[1] = map.occupancy(cell);
        return std::span<const double>(bernoulli);
      });
}

double pose_entropy_naive(std::span<const double> normalized_weights) {
  return entropy_bits(normalized_weights);
}

double pose_entropy_naive(const rbpf::ParticleSet& set) {
  const std::vector<double> w = rbpf::normalized_weights(set);
  return pose_entropy_naive(std::span<const double>(w));
}

double pose_entropy_bayes(std::span<const geom::Pose2D> prev_poses,
                          std::span<const double> prev_weights,
                          std::span<const geom::Pose2D> curr_poses,
                          std::span<const double> curr_weights,
                          const rbpf::OdometryReading& u,
                          const rbpf::OdometryModelParams& motion,
                          std::span<const double> meas_log_lik) {
  const std::size_t n = curr_poses.size();
  if (prev_poses.size() != n || prev_weights.size() != n ||
      curr_weights.size() != n || meas_log_lik.size() != n)
    throw std::domain_error("pose_entropy_bayes: size mismatch");

  // Transition mixture sum_j' p(s_k^j' | s_{k-1}^j') w_{k-1}^j', shared by
  // every particle; evaluated in log space.
  double log_mix = 0.0;
  {
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double d =
          rbpf::motion_density(curr_poses[j], prev_poses[j], u, motion);
      terms[j] = d > 0.0 && prev_weights[j] > 0.0
                     ? std::log(d) + std::log(prev_weights[j])
                     : -std::numeric_limits<double>::infinity();
      max_term = std::max(max_term, terms[j]);
    }
    if (!std::isfinite(max_term))
      throw std::runtime_error("pose_entropy_bayes: transition mixture is zero");
    double s = 0.0;
    for (double t : terms) s += std::exp(t - max_term);
    log_mix = max_term + std::log(s);
  }

  // Left term: -sum_j w_k^j log2( p(z|s^j) * mix ).
  double left = 0.0;
  bool any_meas = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (curr_weights[j] <= 0.0) continue;
    if (std::isfinite(meas_log_lik[j])) any_meas = true;
    left -= curr_weights[j] * (meas_log_lik[j] + log_mix) / kLn2;
  }
  if (!any_meas)
    throw std::runtime_error("pose_entropy_bayes: all measurement likelihoods zero");

  // Right term: log2( sum_j p(z|s^j) w_k^j ), via log-sum-exp.
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(n, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n; ++j) {
    if (curr_weights[j] > 0.0 && std::isfinite(meas_log_lik[j])) {
      terms[j] = meas_log_lik[j] + std::log(curr_weights[j]);
      max_term = std::max(max_term, terms[j]);
    }
  }
  double s = 0.0;
  for (double t : terms) s += std::exp(t - max_term);
  const double right = (max_term + std::log(s)) / kLn2;

  return left + right;
}

double pose_entropy_bayes(const rbpf::ParticleSet& set_prev,
                          const rbpf::ParticleSet& set_curr,
                          const rbpf::OdometryReading& u,
                          const sensor::Scan& scan,
                          const rbpf::OdometryModelParams& motion,
                          const sensor::BeamModelParams& beam) {
  if (set_prev.size() != set_curr.size())
    throw std::domain_error("pose_entropy_bayes: particle count mismatch");
  const int n = set_curr.size();
  std::vector<geom::Pose2D> prev_poses(n), curr_poses(n);
  std::vector<double> meas(n);
  for (int j = 0; j < n; ++j) {
    prev_poses[j] = set_prev.particles[j].pose;
    curr_poses[j] = set_curr.particles[j].pose;
    meas[j] = rbpf::measurement_log_likelihood_crm(
        set_curr.particles[j].crm_map(), curr_poses[j], scan, beam);
  }
  const std::vector<double> w_prev = rbpf::normalized_weights(set_prev);
  const std::vector<double> w_curr = rbpf::normalized_weights(set_curr);
  return pose_entropy_bayes(prev_poses, w_prev, curr_poses, w_curr, u, motion,
                            meas);
}

double pose_info_gain(double h_prev_bits, double h_curr_bits) {
  return h_prev_bits - h_curr_bits;
}

InfoScore ucrmi(double i_map, double i_pose, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::domain_error("ucrmi: alpha outside [0, 1]");
  return {i_map, i_pose, alpha * i_map + (1.0 - alpha) * i_pose};
}

sensor::Scan predicted_scan(const crm::ConfidenceRichMap& map,
                            const geom::Pose2D& pose,
                            const ScanGeometry& geometry,
                            const sensor::BeamModelParams& params) {
  const geom::Pose2D sensor_pose = geom::compose(pose, geometry.sensor_offset);
  if (!map.grid().contains(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("predicted_scan: pose outside grid");
  sensor::Scan scan;
  scan.sensor_offset = geometry.sensor_offset;
  for (double bearing : sensor::uniform_bearings(geometry.fov, geometry.n_z)) {
    const geom::RayTrace trace =
        geom::trace_ray(map.grid(), sensor_pose, sensor_pose.theta + bearing,
                        params.z_max_range);
    double range = params.z_max_range;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (map.expected_occupancy(trace.cells[i]) > 0.5) {
        range = std::min(trace.entry[i] + 0.5 * map.grid().resolution,
                         params.z_max_range);
        break;
      }
    }
    scan.beams.push_back({bearing, range});
  }
  return scan;
}

}  // namespace clam::info
