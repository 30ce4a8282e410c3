#include "clam/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace clam::harness {

Metrics compute_metrics(std::span<const geom::Pose2D> estimated,
                        std::span<const geom::Pose2D> reference) {
  if (estimated.size() != reference.size())
    throw std::domain_error("compute_metrics: trajectory length mismatch");
  Metrics m;
  if (estimated.empty()) return m;
  for (std::size_t k = 0; k < estimated.size(); ++k) {
    const double dx = estimated[k].x - reference[k].x;
    const double dy = estimated[k].y - reference[k].y;
    const double dtheta =
        geom::wrap_angle(estimated[k].theta - reference[k].theta);
    m.mae_x += std::abs(dx);
    m.mae_y += std::abs(dy);
    m.mae_theta += std::abs(dtheta);
    m.position_error.push_back(std::hypot(dx, dy));
    m.avg_rmse += m.position_error.back();
  }
  const double n = static_cast<double>(estimated.size());
  m.mae_x /= n;
  m.mae_y /= n;
  m.mae_theta /= n;
  m.avg_rmse /= n;
  return m;
}

void write_trajectory_csv(std::span<const geom::Pose2D> trajectory,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "step,x,y,theta\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k)
    out << k << ',' << trajectory[k].x << ',' << trajectory[k].y << ','
        << trajectory[k].theta << '\n';
}

std::vector<geom::Pose2D> load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);
  std::vector<geom::Pose2D> trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("step", 0) == 0) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    int step;
    geom::Pose2D pose;
    if (!(ss >> step >> pose.x >> pose.y >> pose.theta))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed trajectory row");
    trajectory.push_back(pose);
  }
  return trajectory;
}

}  // namespace clam::harness
