#include "clam/crm.hpp"

#include <cmath>
#include <stdexcept>

#include "clam/raster_io.hpp"

namespace clam::crm {

CellBelief CellBelief::uniform(int bins) {
  CellBelief b;
  b.mass.assign(bins, 1.0 / bins);
  return b;
}

double CellBelief::expectation() const {
  double e = 0.0;
  for (int b = 0; b < bins(); ++b) e += mass[b] * bin_center(b);
  return e;
}

double CellBelief::entropy_bits(bool normalized) const {
  double h = 0.0;
  for (double m : mass)
    if (m > 0.0) h -= m * std::log2(m);
  if (normalized) h /= std::log2(static_cast<double>(bins()));
  return h;
}

void CellBelief::normalize() {
  double sum = 0.0;
  for (double m : mass) sum += m;
  if (sum > 0.0)
    for (double& m : mass) m /= sum;
}

bool update_cell(CellBelief& belief, std::span<const double> likelihood) {
  if (likelihood.size() != belief.mass.size())
    throw std::domain_error("update_cell: likelihood size mismatch");
  double sum = 0.0;
  for (std::size_t b = 0; b < likelihood.size(); ++b)
    sum += belief.mass[b] * likelihood[b];
  if (!(sum > 0.0) || !std::isfinite(sum)) return false;
  for (std::size_t b = 0; b < likelihood.size(); ++b)
    belief.mass[b] = belief.mass[b] * likelihood[b] / sum;
  return true;
}

ConfidenceRichMap::ConfidenceRichMap(const geom::GridSpec& grid, int bins)
    : grid_(grid), bins_(bins) {
  if (!grid.valid()) throw std::domain_error("ConfidenceRichMap: invalid grid");
  if (bins < 2) throw std::domain_error("ConfidenceRichMap: need >= 2 bins");
  beliefs_.assign(grid.cell_count(), CellBelief::uniform(bins));
  expected_.assign(grid.cell_count(), 0.5);
}

bool ConfidenceRichMap::apply_update(int cell,
                                     std::span<const double> likelihood) {
  if (!update_cell(beliefs_[cell], likelihood)) return false;
  expected_[cell] = beliefs_[cell].expectation();
  return true;
}

ScanIntegration ConfidenceRichMap::integrate_scan(
    const geom::Pose2D& pose, const sensor::Scan& scan,
    const sensor::BeamModelParams& params) {
  const geom::Pose2D sensor_pose = geom::compose(pose, scan.sensor_offset);
  if (!grid_.contains(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("integrate_scan: pose outside grid");

  // Phase 1: per beam, trace and compute per-cell likelihood vectors from
  // the frozen pre-scan expected occupancies.
  struct PendingBeam {
    geom::RayTrace trace;
    sensor::BeamAffine affine;
  };
  std::vector<PendingBeam> pending;
  pending.reserve(scan.beams.size());
  std::vector<double> occ;
  for (const sensor::Beam& beam : scan.beams) {
    PendingBeam pb;
    pb.trace = geom::trace_ray(grid_, sensor_pose,
                               sensor_pose.theta + beam.bearing,
                               params.z_max_range);
    if (pb.trace.empty()) continue;
    occ.resize(pb.trace.size());
    for (std::size_t i = 0; i < pb.trace.size(); ++i)
      occ[i] = expected_[pb.trace.cells[i]];
    const double z = std::clamp(beam.range, 0.0, params.z_max_range);
    pb.affine = sensor::beam_affine(z, pb.trace, occ, params);
    pending.push_back(std::move(pb));
  }

  // Phase 2: apply the per-cell updates.
  ScanIntegration stats;
  std::vector<double> likelihood(bins_);
  for (const PendingBeam& pb : pending) {
    for (std::size_t i = 0; i < pb.trace.size(); ++i) {
      const int cell = pb.trace.cells[i];
      const CellBelief& belief = beliefs_[cell];
      for (int b = 0; b < bins_; ++b) {
        const double v = belief.bin_center(b);
        likelihood[b] =
            std::max(0.0, pb.affine.offset[i] + pb.affine.slope[i] * v);
      }
      if (apply_update(cell, likelihood))
        ++stats.cells_updated;
      else
        ++stats.zero_likelihood_skips;
    }
  }
  return stats;
}

void write_occupancy_pgm(const ConfidenceRichMap& map,
                         const std::string& path) {
  io::write_pgm(map.grid().width_cells, map.grid().height_cells,
                map.expected_occupancy(), path);
}

void write_entropy_csv(const ConfidenceRichMap& map, const std::string& path,
                       bool normalized) {
  std::vector<double> entropy(map.grid().cell_count());
  for (int c = 0; c < map.grid().cell_count(); ++c)
    entropy[c] = map.belief(c).entropy_bits(normalized);
  io::write_raster_csv(map.grid().width_cells, map.grid().height_cells,
                       entropy, path);
}

}  // namespace clam::crm
