#include "clam/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace clam::harness {

namespace {

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_value(const std::string& text) {
  std::istringstream ss(text);
  T value;
  if (!(ss >> value)) throw std::runtime_error("unparsable value: " + text);
  return value;
}

template <typename T>
std::string format_value(T value) {
  std::ostringstream ss;
  ss.precision(17);
  ss << value;
  return ss.str();
}

const std::map<std::string, Field>& field_table() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    const auto add = [&t](const std::string& key, auto member) {
      t[key] = {[member](RunConfig& c, const std::string& v) {
                  c.*member = parse_value<
                      std::remove_reference_t<decltype(c.*member)>>(v);
                },
                [member](const RunConfig& c) { return format_value(c.*member); }};
    };
    add("seed", &RunConfig::seed);
    add("world_width", &RunConfig::world_width);
    add("world_height", &RunConfig::world_height);
    add("resolution", &RunConfig::resolution);
    add("clutter", &RunConfig::clutter);
    add("walls", &RunConfig::walls);
    add("rooms", &RunConfig::rooms);
    add("corridor", &RunConfig::corridor);
    add("clearance", &RunConfig::clearance);
    add("n_z", &RunConfig::n_z);
    add("fov", &RunConfig::fov);
    add("z_max", &RunConfig::z_max);
    add("z_hit", &RunConfig::z_hit);
    add("z_short", &RunConfig::z_short);
    add("z_max_weight", &RunConfig::z_max_weight);
    add("z_rand", &RunConfig::z_rand);
    add("sigma_hit", &RunConfig::sigma_hit);
    add("lambda_short", &RunConfig::lambda_short);
    add("sensor_sigma_range", &RunConfig::sensor_sigma_range);
    add("sensor_sigma_bearing", &RunConfig::sensor_sigma_bearing);
    add("alpha1", &RunConfig::alpha1);
    add("alpha2", &RunConfig::alpha2);
    add("alpha3", &RunConfig::alpha3);
    add("alpha4", &RunConfig::alpha4);
    add("filter_alpha_scale", &RunConfig::filter_alpha_scale);
    add("particles", &RunConfig::particles);
    add("map_bins", &RunConfig::map_bins);
    add("steps", &RunConfig::steps);
    add("outcome_bin", &RunConfig::outcome_bin);
    add("alpha", &RunConfig::alpha);
    add("ric_threshold", &RunConfig::ric_threshold);
    add("budget", &RunConfig::budget);
    add("steer", &RunConfig::steer);
    add("window", &RunConfig::window);
    add("thin_particles", &RunConfig::thin_particles);
    add("init_scans", &RunConfig::init_scans);
    add("normalized_entropy", &RunConfig::normalized_entropy);
    return t;
  }();
  return table;
}

}  // namespace

RunConfig explore_defaults() { return RunConfig{}; }

RunConfig slam_defaults() {
  RunConfig config;
  config.world_width = 40.0;
  config.world_height = 40.0;
  config.clutter = 25;
  config.rooms = 0;
  config.corridor = 3.6;
  config.clearance = 1.2;
  config.n_z = 20;
  config.fov = 1.5 * geom::kPi;  // 270 degrees
  config.z_max = 8.0;
  return config;
}

void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value) {
  const auto it = field_table().find(key);
  if (it == field_table().end())
    throw std::runtime_error("unknown config key: " + key);
  it->second.set(config, value);
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key, value;
    if (!(ss >> key)) continue;
    if (!(ss >> value))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": missing value for " + key);
    if (value == "=" && !(ss >> value))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": missing value for " + key);
    try {
      apply_config_value(config, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
}

std::string config_to_string(const RunConfig& config) {
  std::ostringstream ss;
  for (const auto& [key, field] : field_table())
    ss << key << " " << field.get(config) << "\n";
  return ss.str();
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config_to_string(config);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%08x",
                static_cast<unsigned>(h ^ (h >> 32)));
  return buf;
}

}  // namespace clam::harness
