#include "clam/raster_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace clam::io {

namespace {
std::ofstream open_or_throw(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}
}  // namespace

void write_pgm(int width, int height, const std::vector<double>& values,
               const std::string& path) {
  auto out = open_or_throw(path, std::ios::binary);
  out << "P5\n" << width << " " << height << "\n255\n";
  // Row 0 of the grid is the bottom of the world; PGM rows go top-down.
  for (int iy = height - 1; iy >= 0; --iy)
    for (int ix = 0; ix < width; ++ix) {
      const double v = values[static_cast<std::size_t>(iy) * width + ix];
      const int byte = static_cast<int>(std::lround(255.0 * v));
      out.put(static_cast<char>(std::uint8_t(std::clamp(byte, 0, 255))));
    }
}

void write_raster_csv(int width, int height, const std::vector<double>& values,
                      const std::string& path) {
  auto out = open_or_throw(path, std::ios::out);
  out.precision(17);
  for (int iy = 0; iy < height; ++iy) {
    for (int ix = 0; ix < width; ++ix) {
      if (ix) out << ',';
      out << values[static_cast<std::size_t>(iy) * width + ix];
    }
    out << '\n';
  }
}

}  // namespace clam::io
