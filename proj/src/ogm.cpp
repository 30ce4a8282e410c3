#include "clam/ogm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clam/raster_io.hpp"

namespace clam::ogm {

LogOddsMap::LogOddsMap(const geom::GridSpec& grid, const LogOddsParams& params)
    : grid_(grid), params_(params) {
  if (!grid.valid()) throw std::domain_error("LogOddsMap: invalid grid");
  log_odds_.assign(grid.cell_count(), 0.0);
}

void LogOddsMap::add(int cell, double delta) {
  log_odds_[cell] =
      std::clamp(log_odds_[cell] + delta, -params_.clamp, params_.clamp);
}

void LogOddsMap::integrate_scan(const geom::Pose2D& pose,
                                const sensor::Scan& scan,
                                const sensor::BeamModelParams& params) {
  const geom::Pose2D sensor_pose = geom::compose(pose, scan.sensor_offset);
  if (!grid_.contains(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("integrate_scan: pose outside grid");
  for (const sensor::Beam& beam : scan.beams) {
    const double z = std::clamp(beam.range, 0.0, params.z_max_range);
    const geom::RayTrace trace =
        geom::trace_ray(grid_, sensor_pose, sensor_pose.theta + beam.bearing,
                        params.z_max_range);
    const bool max_range = z >= params.z_max_range;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace.entry[i] >= z) break;
      // Hit cell: the last cell entered before the return range.
      const bool is_return_cell =
          !max_range && (i + 1 == trace.size() || trace.entry[i + 1] >= z);
      add(trace.cells[i],
          is_return_cell ? params_.hit_increment : params_.miss_increment);
    }
  }
}

double LogOddsMap::predict_range(const geom::Pose2D& sensor_pose,
                                 double bearing,
                                 const sensor::BeamModelParams& params) const {
  const geom::RayTrace trace =
      geom::trace_ray(grid_, sensor_pose, bearing, params.z_max_range);
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (occupied(trace.cells[i]))
      return std::min(trace.entry[i] + 0.5 * grid_.resolution,
                      params.z_max_range);
  return params.z_max_range;
}

double fixed_map_log_likelihood(const LogOddsMap& map, const geom::Pose2D& pose,
                                const sensor::Scan& scan,
                                const sensor::BeamModelParams& params) {
  const geom::Pose2D sensor_pose = geom::compose(pose, scan.sensor_offset);
  if (!map.grid().contains(sensor_pose.x, sensor_pose.y))
    throw std::domain_error("fixed_map_log_likelihood: pose outside grid");
  double log_lik = 0.0;
  for (const sensor::Beam& beam : scan.beams) {
    const double z = std::clamp(beam.range, 0.0, params.z_max_range);
    const double z_star =
        map.predict_range(sensor_pose, sensor_pose.theta + beam.bearing,
                          params);
    log_lik += std::log(sensor::beam_density(z, z_star, params));
  }
  return log_lik;
}

void write_occupancy_pgm(const LogOddsMap& map, const std::string& path) {
  std::vector<double> occ(map.grid().cell_count());
  for (int c = 0; c < map.grid().cell_count(); ++c) occ[c] = map.occupancy(c);
  io::write_pgm(map.grid().width_cells, map.grid().height_cells, occ, path);
}

}  // namespace clam::ogm
