#include "clam/scan_log.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace clam::harness {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

sensor::Scan ScanLog::make_scan(const ScanRecord& record) const {
  sensor::Scan scan;
  scan.timestamp = record.t;
  scan.sensor_offset = header.sensor_offset;
  const std::vector<double> bearings =
      sensor::uniform_bearings(header.fov, header.n_z);
  scan.beams.resize(header.n_z);
  for (int l = 0; l < header.n_z; ++l)
    scan.beams[l] = {bearings[l], record.ranges[l]};
  return scan;
}

ScanLog load_scan_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan log: " + path);

  ScanLog log;
  bool have_header = false;
  double last_t = -std::numeric_limits<double>::infinity();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;

    if (tag == "HEADER") {
      std::string k_fov, k_zmax, k_nz, k_offset;
      if (!(ss >> k_fov >> log.header.fov >> k_zmax >> log.header.z_max >>
            k_nz >> log.header.n_z >> k_offset >> log.header.sensor_offset.x >>
            log.header.sensor_offset.y >> log.header.sensor_offset.theta) ||
          k_fov != "fov" || k_zmax != "zmax" || k_nz != "nz" ||
          k_offset != "offset")
        parse_fail(path, line_no, "malformed HEADER record");
      if (log.header.n_z <= 0 || log.header.z_max <= 0.0 ||
          log.header.fov <= 0.0)
        parse_fail(path, line_no, "HEADER values out of range");
      have_header = true;
      continue;
    }
    if (!have_header) parse_fail(path, line_no, "record before HEADER");

    if (tag == "ODOM") {
      OdomRecord rec;
      if (!(ss >> rec.t >> rec.pose.x >> rec.pose.y >> rec.pose.theta))
        parse_fail(path, line_no, "malformed ODOM record");
      if (rec.t < last_t) parse_fail(path, line_no, "timestamps decrease");
      last_t = rec.t;
      log.order.push_back(ScanLog::Kind::kOdom);
      log.odom.push_back(rec);
    } else if (tag == "SCAN") {
      ScanRecord rec;
      if (!(ss >> rec.t)) parse_fail(path, line_no, "malformed SCAN record");
      if (rec.t < last_t) parse_fail(path, line_no, "timestamps decrease");
      last_t = rec.t;
      double r;
      while (ss >> r) rec.ranges.push_back(r);
      if (static_cast<int>(rec.ranges.size()) != log.header.n_z)
        parse_fail(path, line_no,
                   "SCAN has " + std::to_string(rec.ranges.size()) +
                       " ranges, expected " + std::to_string(log.header.n_z));
      for (double range : rec.ranges)
        if (range < 0.0 || range > log.header.z_max)
          parse_fail(path, line_no, "range outside [0, zmax]");
      log.order.push_back(ScanLog::Kind::kScan);
      log.scans.push_back(std::move(rec));
    } else {
      parse_fail(path, line_no, "unknown record tag '" + tag + "'");
    }
  }
  if (!have_header) throw std::runtime_error(path + ": missing HEADER");
  return log;
}

void save_scan_log(const ScanLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "HEADER fov " << log.header.fov << " zmax " << log.header.z_max
      << " nz " << log.header.n_z << " offset " << log.header.sensor_offset.x
      << " " << log.header.sensor_offset.y << " "
      << log.header.sensor_offset.theta << "\n";
  std::size_t io = 0, is = 0;
  for (ScanLog::Kind kind : log.order) {
    if (kind == ScanLog::Kind::kOdom) {
      const OdomRecord& rec = log.odom[io++];
      out << "ODOM " << rec.t << " " << rec.pose.x << " " << rec.pose.y << " "
          << rec.pose.theta << "\n";
    } else {
      const ScanRecord& rec = log.scans[is++];
      out << "SCAN " << rec.t;
      for (double r : rec.ranges) out << " " << r;
      out << "\n";
    }
  }
}

std::vector<rbpf::OdometryReading> relative_odometry(const ScanLog& log) {
  std::vector<rbpf::OdometryReading> readings;
  for (std::size_t i = 1; i < log.odom.size(); ++i)
    readings.push_back(rbpf::OdometryReading::from_poses(log.odom[i - 1].pose,
                                                         log.odom[i].pose));
  return readings;
}

}  // namespace clam::harness
