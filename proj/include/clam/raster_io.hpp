#pragma once

#include <string>
#include <vector>

namespace clam::io {

// 8-bit binary PGM; values expected in [0,1] and scaled to [0,255].
void write_pgm(int width, int height, const std::vector<double>& values,
               const std::string& path);

// One grid row per line, comma separated, max-precision floats.
void write_raster_csv(int width, int height, const std::vector<double>& values,
                      const std::string& path);

}  // namespace clam::io
