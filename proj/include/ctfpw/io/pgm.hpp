#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "ctfpw/core/error.hpp"
#include "ctfpw/core/grid.hpp"

namespace ctfpw::io {

struct PgmScale {
  double min = 0.0;
  double max = 0.0;
};

/// 16-bit binary PGM; value v maps to round(65535 (v - min) / (max - min)).
/// Row i of the field is image row i.
inline PgmScale write_pgm16(const std::filesystem::path& path,
                            const RealField2D& field) {
  const auto v = field.values();
  PgmScale s;
  if (!v.empty()) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    s = {*lo, *hi};
  }
  const double span = s.max - s.min;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  const int n = field.n();
  os << "P5\n" << n << ' ' << n << "\n65535\n";
  for (double x : v) {
    const double u = span > 0.0 ? (x - s.min) / span : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(65535.0 * u));
    const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
    os.write(bytes, 2);
  }
  return s;
}

}  // namespace ctfpw::io
