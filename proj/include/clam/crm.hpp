#pragma once

#include <span>
#include <string>
#include <vector>

#include "clam/geom.hpp"
#include "clam/sensor.hpp"

namespace clam::crm {

// Discrete histogram over a cell's continuous occupancy level in [0,1].
// Bin b covers [(b)/n, (b+1)/n) with center (b + 0.5)/n; masses sum to one.
struct CellBelief {
  std::vector<double> mass;

  static CellBelief uniform(int bins);
  int bins() const { return static_cast<int>(mass.size()); }
  double bin_center(int b) const { return (b + 0.5) / mass.size(); }
  double expectation() const;
  // Shannon entropy in bits; raw (max log2 bins) unless normalized.
  double entropy_bits(bool normalized = false) const;
  void normalize();
};

// Posterior mass_b proportional to prior mass_b * likelihood[b]. Returns
// false (belief unchanged) when every likelihood entry is zero.
bool update_cell(CellBelief& belief, std::span<const double> likelihood);

struct ScanIntegration {
  int cells_updated = 0;
  int zero_likelihood_skips = 0;
};

// Grid of cell beliefs plus the cached expected-occupancy raster.
class ConfidenceRichMap {
 public:
  ConfidenceRichMap() = default;
  // Every cell starts uniform over `bins` occupancy levels.
  ConfidenceRichMap(const geom::GridSpec& grid, int bins);

  const geom::GridSpec& grid() const { return grid_; }
  int bins() const { return bins_; }
  const CellBelief& belief(int cell) const { return beliefs_[cell]; }
  double expected_occupancy(int cell) const { return expected_[cell]; }
  const std::vector<double>& expected_occupancy() const { return expected_; }

  // Bayesian update of one cell; refreshes the cached expectation.
  bool apply_update(int cell, std::span<const double> likelihood);

  // Integrates one scan taken at `pose`: per beam, traces the ray and
  // updates every traversed cell with the per-bin measurement likelihoods.
  // Cause profiles for all beams use the pre-scan expected occupancies.
  // Throws std::domain_error if the sensor pose is outside the grid.
  ScanIntegration integrate_scan(const geom::Pose2D& pose,
                                 const sensor::Scan& scan,
                                 const sensor::BeamModelParams& params);

 private:
  geom::GridSpec grid_;
  int bins_ = 0;
  std::vector<CellBelief> beliefs_;
  std::vector<double> expected_;
};

// Expected occupancy as an 8-bit PGM: value = round(255 * m), 0 free.
void write_occupancy_pgm(const ConfidenceRichMap& map, const std::string& path);
// Per-cell entropy raster (bits) as CSV, one grid row per line.
void write_entropy_csv(const ConfidenceRichMap& map, const std::string& path,
                       bool normalized = false);

}  // namespace clam::crm
