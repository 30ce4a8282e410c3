#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "clam/crm.hpp"
#include "clam/geom.hpp"
#include "clam/ogm.hpp"
#include "clam/sensor.hpp"

namespace clam::rbpf {

// Noise coefficients of the rot1-trans-rot2 odometry model; each component's
// variance is scaled by the squared magnitudes of the commanded motion.
struct OdometryModelParams {
  double alpha1 = 0.0;  // rot noise from rotation
  double alpha2 = 0.0;  // rot noise from translation
  double alpha3 = 0.0;  // trans noise from translation
  double alpha4 = 0.0;  // trans noise from rotation
};

// Relative motion between steps, decomposed as rotate / translate / rotate.
struct OdometryReading {
  double rot1 = 0.0;
  double trans = 0.0;
  double rot2 = 0.0;

  static OdometryReading from_poses(const geom::Pose2D& prev,
                                    const geom::Pose2D& next);
  geom::Pose2D as_delta() const;
};

// Deterministic per-(seed, step, slot, purpose) generator streams, so that
// resampling-induced reordering never changes downstream draws.
namespace purpose {
inline constexpr std::uint64_t kMotion = 1;
inline constexpr std::uint64_t kResample = 2;
}  // namespace purpose

std::mt19937_64 derive_rng(std::uint64_t master_seed, std::uint64_t step,
                           std::uint64_t slot, std::uint64_t purpose);

geom::Pose2D sample_motion(const geom::Pose2D& prev, const OdometryReading& u,
                           const OdometryModelParams& params,
                           std::mt19937_64& rng);

// Density of the transition prev -> next under the odometry model, expressed
// over the (rot1, trans, rot2) coordinates recovered from the pose pair.
// Throws std::domain_error if any component variance is zero.
double motion_density(const geom::Pose2D& next, const geom::Pose2D& prev,
                      const OdometryReading& u,
                      const OdometryModelParams& params);

enum class MapMode { kClam, kOgm };

struct Particle {
  geom::Pose2D pose;
  std::vector<geom::Pose2D> trajectory;
  double log_weight = 0.0;
  std::variant<crm::ConfidenceRichMap, ogm::LogOddsMap> map;

  crm::ConfidenceRichMap& crm_map() { return std::get<crm::ConfidenceRichMap>(map); }
  const crm::ConfidenceRichMap& crm_map() const {
    return std::get<crm::ConfidenceRichMap>(map);
  }
  ogm::LogOddsMap& ogm_map() { return std::get<ogm::LogOddsMap>(map); }
  const ogm::LogOddsMap& ogm_map() const { return std::get<ogm::LogOddsMap>(map); }
};

struct ParticleSet {
  std::vector<Particle> particles;
  std::uint64_t seed = 0;
  std::uint64_t step_count = 0;
  bool keep_trajectories = true;

  int size() const { return static_cast<int>(particles.size()); }
};

// All particles at `start` with equal weights and a copy of the given map.
ParticleSet init_particle_set(int n_particles, const geom::Pose2D& start,
                              const crm::ConfidenceRichMap& map,
                              std::uint64_t seed);
ParticleSet init_particle_set(int n_particles, const geom::Pose2D& start,
                              const ogm::LogOddsMap& map, std::uint64_t seed);

// Normalized weights; throws std::runtime_error when all weights underflow.
std::vector<double> normalized_weights(const ParticleSet& set);

double effective_particles(const ParticleSet& set);

// Scan log-likelihood of one pose against a confidence-rich map: product of
// per-beam cause-profile likelihoods built from the map's expected
// occupancies (each queried cell marginalized over its belief histogram).
double measurement_log_likelihood_crm(const crm::ConfidenceRichMap& map,
                                      const geom::Pose2D& pose,
                                      const sensor::Scan& scan,
                                      const sensor::BeamModelParams& params);

// Closed-form belief-based weight update (pre-update map belief).
void weight_clam(Particle& particle, const sensor::Scan& scan,
                 const sensor::BeamModelParams& params);

// Baseline fixed-map weight update.
void weight_ogm(Particle& particle, const sensor::Scan& scan,
                const sensor::BeamModelParams& params);

// Systematic (low-variance) resampling positions: index of the particle
// selected for each of n slots, given offset u0 in [0, 1/n).
std::vector<int> systematic_resample_indices(const std::vector<double>& weights,
                                             int n, double u0);

// Draws n_p particles proportional to weight (maps deep-copied on
// duplication) and resets all weights to equal.
void resample(ParticleSet& set, std::mt19937_64& rng);

struct StepConfig {
  MapMode mode = MapMode::kClam;
  OdometryModelParams odometry;
  sensor::BeamModelParams beam;
};

struct StepStats {
  double n_eff = 0.0;  // before any resampling
  bool resampled = false;
};

// One full filter step: propagate, weight from the pre-update map, update
// the map at the propagated pose, then resample when N_eff < n_p / 2.
StepStats step(ParticleSet& set, const OdometryReading& u,
               const sensor::Scan& scan, const StepConfig& config);

// Weighted mean position and circular-mean heading.
geom::Pose2D estimate(const ParticleSet& set);

}  // namespace clam::rbpf
