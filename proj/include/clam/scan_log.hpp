#pragma once

#include <string>
#include <vector>

#include "clam/geom.hpp"
#include "clam/rbpf.hpp"
#include "clam/sensor.hpp"

namespace clam::harness {

// Line-oriented plain-text sensor log. One record per line, space separated,
// '#' starts a comment; the HEADER line is mandatory and precedes records:
//   HEADER fov <rad> zmax <m> nz <count> offset <x> <y> <theta>
//   ODOM <t> <x> <y> <theta>
//   SCAN <t> <r_1> ... <r_nz>
// SCAN bearings are implied: n_z slot-centered beams over the field of view.
struct ScanLogHeader {
  double fov = 2.0 * geom::kPi;
  double z_max = 5.0;
  int n_z = 10;
  geom::Pose2D sensor_offset;
};

struct OdomRecord {
  double t = 0.0;
  geom::Pose2D pose;  // raw odometry pose
};

struct ScanRecord {
  double t = 0.0;
  std::vector<double> ranges;
};

struct ScanLog {
  ScanLogHeader header;
  // Records in file order; kind[i] selects which vector entry is next.
  enum class Kind { kOdom, kScan };
  std::vector<Kind> order;
  std::vector<OdomRecord> odom;
  std::vector<ScanRecord> scans;

  sensor::Scan make_scan(const ScanRecord& record) const;
};

// Parses and validates a log; parse failures name the offending line.
ScanLog load_scan_log(const std::string& path);
void save_scan_log(const ScanLog& log, const std::string& path);

// Relative odometry readings between consecutive ODOM records.
std::vector<rbpf::OdometryReading> relative_odometry(const ScanLog& log);

}  // namespace clam::harness
