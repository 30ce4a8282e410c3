#pragma once

#include <span>
#include <vector>

#include "clam/geom.hpp"

namespace clam::sensor {

// Mixture weights and shape parameters of the beam range-finder model.
// The max-range component is a discrete atom at exactly z == z_max_range;
// all continuous components are normalized over their own support.
struct BeamModelParams {
  double z_hit = 0.7;
  double z_short = 0.1;
  double z_max = 0.1;
  double z_rand = 0.1;
  double sigma_hit = 0.05;     // meters
  double lambda_short = 0.2;   // decay rate of the short-return component
  double z_max_range = 5.0;    // meters

  bool weights_normalized(double tol = 1e-9) const {
    return std::abs(z_hit + z_short + z_max + z_rand - 1.0) <= tol &&
           z_hit >= 0.0 && z_short >= 0.0 && z_max >= 0.0 && z_rand >= 0.0;
  }
};

struct Beam {
  double bearing = 0.0;  // radians, sensor frame
  double range = 0.0;    // meters, clamped to [0, z_max_range]
};

struct Scan {
  double timestamp = 0.0;
  std::vector<Beam> beams;          // bearings strictly increasing
  geom::Pose2D sensor_offset;       // sensor pose in the robot frame
};

// Bearings centered in n_z uniform slots over the field of view, so a 360
// degree scan has no duplicate end beam.
std::vector<double> uniform_bearings(double fov, int n_z);

// Measurement density at z given an expected return at z_star. For
// z == z_max_range the returned value additionally carries the discrete
// max-range atom mass. Throws std::domain_error if z is outside
// [0, z_max_range] or z_star outside (0, z_max_range].
double beam_density(double z, double z_star, const BeamModelParams& params);

// Continuous part only (hit + short + rand), without the atom.
double beam_density_continuous(double z, double z_star,
                               const BeamModelParams& params);

// Which cell along a ray caused the return, marginalized over the per-cell
// expected occupancies: cause[i] = e_i * prod_{j<i} (1 - e_j), and the
// no-hit cause is the product over all cells. Sums to one by construction.
struct CauseProfile {
  std::vector<double> cause;   // one entry per traced cell
  std::vector<double> range;   // nominal per-cell range r_i = entry + res/2
  double no_hit = 1.0;
};

CauseProfile cause_profile(const geom::RayTrace& trace,
                           std::span<const double> expected_occ);

// p(z | profile): mixture of beam densities over the cause probabilities,
// with the no-hit cause evaluated at z_max_range.
double beam_likelihood(double z, const CauseProfile& profile,
                       const BeamModelParams& params);

// Same as beam_likelihood but with the expected occupancy at trace position
// `cell_pos` replaced by the hypothesized value v. Throws std::domain_error
// if cell_pos is not a valid trace position.
double beam_likelihood_given_cell(double z, const geom::RayTrace& trace,
                                  std::span<const double> expected_occ,
                                  std::size_t cell_pos, double v,
                                  const BeamModelParams& params);

// The beam likelihood is affine in any single cell's occupancy value:
// L(v at cell i) = offset[i] + slope[i] * v. One pass computes the
// coefficients for every traced cell plus the likelihood at the expected
// occupancies themselves; this is what makes per-cell belief updates cheap.
struct BeamAffine {
  std::vector<double> offset;
  std::vector<double> slope;
  double at_expected = 0.0;  // likelihood with every cell at its expected value
};

BeamAffine beam_affine(double z, const geom::RayTrace& trace,
                       std::span<const double> expected_occ,
                       const BeamModelParams& params);

}  // namespace clam::sensor
