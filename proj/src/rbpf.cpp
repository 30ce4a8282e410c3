#include "clam/rbpf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clam::rbpf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gaussian_density(double residual, double variance) {
  return std::exp(-0.5 * residual * residual / variance) /
         std::sqrt(2.0 * geom::kPi * variance);
}

double log_sum_exp(const std::vector<double>& log_values) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (double v : log_values) max_log = std::max(max_log, v);
  if (!std::isfinite(max_log)) return max_log;
  double sum = 0.0;
  for (double v : log_values) sum += std::exp(v - max_log);
  return max_log + std::log(sum);
}

struct MotionVariances {
  double rot1, trans, rot2;
};

MotionVariances motion_variances(const OdometryReading& u,
                                 const OdometryModelParams& p) {
  return {p.alpha1 * u.rot1 * u.rot1 + p.alpha2 * u.trans * u.trans,
          p.alpha3 * u.trans * u.trans +
              p.alpha4 * (u.rot1 * u.rot1 + u.rot2 * u.rot2),
          p.alpha1 * u.rot2 * u.rot2 + p.alpha2 * u.trans * u.trans};
}

}  // namespace

OdometryReading OdometryReading::from_poses(const geom::Pose2D& prev,
                                            const geom::Pose2D& next) {
  const double dx = next.x - prev.x;
  const double dy = next.y - prev.y;
  OdometryReading u;
  u.trans = std::hypot(dx, dy);
  // Pure rotations carry no heading information for rot1.
  u.rot1 = u.trans > 1e-12
               ? geom::wrap_angle(std::atan2(dy, dx) - prev.theta)
               : 0.0;
  u.rot2 = geom::wrap_angle(next.theta - prev.theta - u.rot1);
  return u;
}

geom::Pose2D OdometryReading::as_delta() const {
  return {trans * std::cos(rot1), trans * std::sin(rot1),
          geom::wrap_angle(rot1 + rot2)};
}

std::mt19937_64 derive_rng(std::uint64_t master_seed, std::uint64_t step,
                           std::uint64_t slot, std::uint64_t purpose) {
  std::uint64_t state = splitmix64(master_seed);
  state = splitmix64(state ^ splitmix64(step));
  state = splitmix64(state ^ splitmix64(slot));
  state = splitmix64(state ^ splitmix64(purpose));
  return std::mt19937_64(state);
}

geom::Pose2D sample_motion(const geom::Pose2D& prev, const OdometryReading& u,
                           const OdometryModelParams& params,
                           std::mt19937_64& rng) {
  const MotionVariances var = motion_variances(u, params);
  std::normal_distribution<double> unit(0.0, 1.0);
  OdometryReading noisy;
  noisy.rot1 = u.rot1 + (var.rot1 > 0.0 ? std::sqrt(var.rot1) * unit(rng) : 0.0);
  noisy.trans =
      u.trans + (var.trans > 0.0 ? std::sqrt(var.trans) * unit(rng) : 0.0);
  noisy.rot2 = u.rot2 + (var.rot2 > 0.0 ? std::sqrt(var.rot2) * unit(rng) : 0.0);
  return geom::compose(prev, noisy.as_delta());
}

double motion_density(const geom::Pose2D& next, const geom::Pose2D& prev,
                      const OdometryReading& u,
                      const OdometryModelParams& params) {
  const MotionVariances var = motion_variances(u, params);
  if (!(var.rot1 > 0.0) || !(var.trans > 0.0) || !(var.rot2 > 0.0))
    throw std::domain_error("motion_density: zero variance component");
  const OdometryReading actual = OdometryReading::from_poses(prev, next);
  return gaussian_density(geom::wrap_angle(actual.rot1 - u.rot1), var.rot1) *
         gaussian_density(actual.trans - u.trans, var.trans) *
         gaussian_density(geom::wrap_angle(actual.rot2 - u.rot2), var.rot2);
}

ParticleSet init_particle_set(int n_particles, const geom::Pose2D& start,
                              const crm::ConfidenceRichMap& map,
                              std::uint64_t seed) {
  ParticleSet set;
  set.seed = seed;
  set.particles.resize(n_particles);
  for (Particle& p : set.particles) {
    p.pose = start;
    p.trajectory = {start};
    p.map = map;
  }
  return set;
}

ParticleSet init_particle_set(int n_particles, const geom::Pose2D& start,
                              const ogm::LogOddsMap& map, std::uint64_t seed) {
  ParticleSet set;
  set.seed = seed;
  set.particles.resize(n_particles);
  for (Particle& p : set.particles) {
    p.pose = start;
    p.trajectory = {start};
    p.map = map;
  }
  return set;
}

std::vector<double> normalized_weights(const ParticleSet& set) {
  std::vector<double> log_w(set.particles.size());
  for (std::size_t j = 0; j < set.particles.size(); ++j)
    log_w[j] = set.particles[j].log_weight;
  const double norm = log_sum_exp(log_w);
  if (!std::isfinite(norm))
    throw std::runtime_error("particle weights are all zero (filter diverged)");
  std::vector<double> w(log_w.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(log_w[j] - norm);
  return w;
}

double effective_particles(const ParticleSet& set) {
  const std::vector<double> w = normalized_weights(set);
  double sum_sq = 0.0;
  for (double wi : w) sum_sq += wi * wi;
  return 1.0 / sum_sq;
}

double measurement_log_likelihood_crm(const crm::ConfidenceRichMap& map,
                                      const geom::Pose2D& pose,
                                      const sensor::Scan& scan,
                                      const sensor::BeamModelParams& params) {
  const geom::Pose2D sensor_pose = geom::compose(pose, scan.sensor_offset);
  if (!map.grid().contains(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("measurement_log_likelihood_crm: pose outside grid");
  double log_lik = 0.0;
  std::vector<double> occ;
  for (const sensor::Beam& beam : scan.beams) {
    const geom::RayTrace trace =
        geom::trace_ray(map.grid(), sensor_pose,
                        sensor_pose.theta + beam.bearing, params.z_max_range);
    occ.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
      occ[i] = map.expected_occupancy(trace.cells[i]);
    const double z = std::clamp(beam.range, 0.0, params.z_max_range);
    log_lik +=
        std::log(sensor::beam_likelihood(z, sensor::cause_profile(trace, occ),
                                         params));
  }
  return log_lik;
}

void weight_clam(Particle& particle, const sensor::Scan& scan,
                 const sensor::BeamModelParams& params) {
  particle.log_weight += measurement_log_likelihood_crm(
      particle.crm_map(), particle.pose, scan, params);
}

void weight_ogm(Particle& particle, const sensor::Scan& scan,
                const sensor::BeamModelParams& params) {
  particle.log_weight += ogm::fixed_map_log_likelihood(
      particle.ogm_map(), particle.pose, scan, params);
}

std::vector<int> systematic_resample_indices(const std::vector<double>& weights,
                                             int n, double u0) {
  std::vector<int> indices;
  indices.reserve(n);
  double cumulative = weights.empty() ? 0.0 : weights[0];
  int i = 0;
  for (int m = 0; m < n; ++m) {
    const double u = u0 + static_cast<double>(m) / n;
    // >= so that a zero offset still steps past an exactly-consumed weight.
    while (u >= cumulative && i + 1 < static_cast<int>(weights.size())) {
      ++i;
      cumulative += weights[i];
    }
    indices.push_back(i);
  }
  return indices;
}

void resample(ParticleSet& set, std::mt19937_64& rng) {
  const int n = set.size();
  const std::vector<double> w = normalized_weights(set);
  std::uniform_real_distribution<double> offset(0.0, 1.0 / n);
  const std::vector<int> picks = systematic_resample_indices(w, n, offset(rng));

  // Survivors stay in place; duplicates deep-copy their source particle.
  std::vector<int> multiplicity(n, 0);
  for (int idx : picks) ++multiplicity[idx];
  std::vector<Particle> next;
  next.reserve(n);
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < multiplicity[j]; ++c) {
      if (c + 1 == multiplicity[j])
        next.push_back(std::move(set.particles[j]));
      else
        next.push_back(set.particles[j]);
    }
  }
  set.particles = std::move(next);
  for (Particle& p : set.particles) p.log_weight = 0.0;
}

StepStats step(ParticleSet& set, const OdometryReading& u,
               const sensor::Scan& scan, const StepConfig& config) {
  set.step_count += 1;
  for (int j = 0; j < set.size(); ++j) {
    Particle& p = set.particles[j];
    std::mt19937_64 rng =
        derive_rng(set.seed, set.step_count, static_cast<std::uint64_t>(j),
                   purpose::kMotion);
    p.pose = sample_motion(p.pose, u, config.odometry, rng);
    if (set.keep_trajectories) p.trajectory.push_back(p.pose);
    // Weight from the pre-update map belief, then map the propagated pose.
    // A particle that wandered off the map cannot explain the scan: it gets
    // a flat penalty below any in-map likelihood and no map update.
    const geom::Pose2D sensor_pose = geom::compose(p.pose, scan.sensor_offset);
    const geom::GridSpec& grid = config.mode == MapMode::kClam
                                     ? p.crm_map().grid()
                                     : p.ogm_map().grid();
    if (!grid.contains(sensor_pose.x, sensor_pose.y)) {
      constexpr double kOffMapLogDensity = -13.8;  // ~log(1e-6)
      p.log_weight += kOffMapLogDensity * static_cast<double>(scan.beams.size());
    } else if (config.mode == MapMode::kClam) {
      weight_clam(p, scan, config.beam);
      p.crm_map().integrate_scan(p.pose, scan, config.beam);
    } else {
      weight_ogm(p, scan, config.beam);
      p.ogm_map().integrate_scan(p.pose, scan, config.beam);
    }
  }
  StepStats stats;
  stats.n_eff = effective_particles(set);
  if (stats.n_eff < set.size() / 2.0) {
    std::mt19937_64 rng = derive_rng(set.seed, set.step_count, 0, purpose::kResample);
    resample(set, rng);
    stats.resampled = true;
  }
  return stats;
}

geom::Pose2D estimate(const ParticleSet& set) {
  const std::vector<double> w = normalized_weights(set);
  double x = 0.0, y = 0.0, sin_sum = 0.0, cos_sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const geom::Pose2D& pose = set.particles[j].pose;
    x += w[j] * pose.x;
    y += w[j] * pose.y;
    sin_sum += w[j] * std::sin(pose.theta);
    cos_sum += w[j] * std::cos(pose.theta);
  }
  return {x, y, std::atan2(sin_sum, cos_sum)};
}

}  // namespace clam::rbpf
