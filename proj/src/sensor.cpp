#include "clam/sensor.hpp"

#include <cmath>
#include <stdexcept>

namespace clam::sensor {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

double hit_density(double z, double z_star, const BeamModelParams& p) {
  // Gaussian around the expected return, renormalized over [0, z_max_range].
  const double mass = normal_cdf((p.z_max_range - z_star) / p.sigma_hit) -
                      normal_cdf((0.0 - z_star) / p.sigma_hit);
  if (mass <= 0.0) return 0.0;
  const double u = (z - z_star) / p.sigma_hit;
  return kInvSqrt2Pi / p.sigma_hit * std::exp(-0.5 * u * u) / mass;
}

double short_density(double z, double z_star, const BeamModelParams& p) {
  // Truncated exponential on [0, z_star].
  if (z > z_star) return 0.0;
  const double norm = 1.0 - std::exp(-p.lambda_short * z_star);
  if (norm <= 0.0) return 0.0;
  return p.lambda_short * std::exp(-p.lambda_short * z) / norm;
}

}  // namespace

std::vector<double> uniform_bearings(double fov, int n_z) {
  std::vector<double> bearings(n_z);
  for (int l = 0; l < n_z; ++l)
    bearings[l] = -0.5 * fov + (l + 0.5) * fov / n_z;
  return bearings;
}

double beam_density_continuous(double z, double z_star,
                               const BeamModelParams& p) {
  return p.z_hit * hit_density(z, z_star, p) +
         p.z_short * short_density(z, z_star, p) + p.z_rand / p.z_max_range;
}

double beam_density(double z, double z_star, const BeamModelParams& p) {
  if (z < 0.0 || z > p.z_max_range)
    throw std::domain_error("beam_density: z outside [0, z_max_range]");
  if (!(z_star > 0.0) || z_star > p.z_max_range)
    throw std::domain_error("beam_density: z_star outside (0, z_max_range]");
  double d = beam_density_continuous(z, z_star, p);
  if (z == p.z_max_range) d += p.z_max;
  return d;
}

CauseProfile cause_profile(const geom::RayTrace& trace,
                           std::span<const double> expected_occ) {
  if (expected_occ.size() != trace.size())
    throw std::domain_error("cause_profile: occupancy size mismatch");
  CauseProfile profile;
  profile.cause.resize(trace.size());
  profile.range.resize(trace.size());
  double transparent = 1.0;  // prod of (1 - e_j) over cells before i
  for (std::size_t i = 0; i < trace.size(); ++i) {
    profile.cause[i] = expected_occ[i] * transparent;
    profile.range[i] = trace.entry[i] + 0.5 * trace.resolution;
    transparent *= 1.0 - expected_occ[i];
  }
  profile.no_hit = transparent;
  return profile;
}

double beam_likelihood(double z, const CauseProfile& profile,
                       const BeamModelParams& p) {
  double density = profile.no_hit * beam_density(z, p.z_max_range, p);
  for (std::size_t i = 0; i < profile.cause.size(); ++i) {
    const double r = std::min(profile.range[i], p.z_max_range);
    density += profile.cause[i] * beam_density(z, r, p);
  }
  return density;
}

BeamAffine beam_affine(double z, const geom::RayTrace& trace,
                       std::span<const double> expected_occ,
                       const BeamModelParams& p) {
  const std::size_t n = trace.size();
  BeamAffine aff;
  aff.offset.resize(n);
  aff.slope.resize(n);

  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::min(trace.entry[i] + 0.5 * trace.resolution,
                              p.z_max_range);
    density[i] = beam_density(z, r, p);
  }
  const double density_max = beam_density(z, p.z_max_range, p);

  // after[i]: likelihood contribution of everything past cell i, given the
  // beam reaches past cell i.
  std::vector<double> after(n);
  if (n > 0) {
    after[n - 1] = density_max;
    for (std::size_t i = n - 1; i-- > 0;)
      after[i] = expected_occ[i + 1] * density[i + 1] +
                 (1.0 - expected_occ[i + 1]) * after[i + 1];
  }

  double before = 0.0;      // sum of cause_j * density_j over cells before i
  double transparent = 1.0; // prod of (1 - e_j) over cells before i
  for (std::size_t i = 0; i < n; ++i) {
    aff.offset[i] = before + transparent * after[i];
    aff.slope[i] = transparent * (density[i] - after[i]);
    before += expected_occ[i] * transparent * density[i];
    transparent *= 1.0 - expected_occ[i];
  }
  aff.at_expected = before + transparent * density_max;
  if (n == 0) aff.at_expected = density_max;
  return aff;
}

double beam_likelihood_given_cell(double z, const geom::RayTrace& trace,
                                  std::span<const double> expected_occ,
                                  std::size_t cell_pos, double v,
                                  const BeamModelParams& p) {
  if (cell_pos >= trace.size())
    throw std::domain_error("beam_likelihood_given_cell: cell not on trace");
  std::vector<double> occ(expected_occ.begin(), expected_occ.end());
  occ[cell_pos] = v;
  return beam_likelihood(z, cause_profile(trace, occ), p);
}

}  // namespace clam::sensor
