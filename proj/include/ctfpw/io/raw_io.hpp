#pragma once

// Raw arrays: little-endian float64, row-major, next to a JSON manifest
//   {"n": ..., "extent": ..., "kind": "real" | "complex-interleaved",
//    "data": "<file name>", "extra": {...}}

#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctfpw/core/error.hpp"
#include "ctfpw/core/grid.hpp"

namespace ctfpw::io {

namespace fs = std::filesystem;

inline void write_le_doubles(std::ostream& os, const double* values,
                             std::size_t count) {
  static_assert(sizeof(double) == 8);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &values[i], 8);
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap64(bits);
    }
    os.write(reinterpret_cast<const char*>(&bits), 8);
  }
}

inline std::vector<double> read_le_doubles(std::istream& is, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    if (!is.read(reinterpret_cast<char*>(&bits), 8)) {
      throw ValidationError("raw file is shorter than its manifest states");
    }
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap64(bits);
    }
    std::memcpy(&out[i], &bits, 8);
  }
  return out;
}

inline nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct RawPaths {
  fs::path data;
  fs::path manifest;
};

/// Paths for an output stem: stem.raw and stem.json.
inline RawPaths raw_paths(const fs::path& stem) {
  return {fs::path(stem.string() + ".raw"), fs::path(stem.string() + ".json")};
}

template <class T>
RawPaths write_field(const fs::path& stem, const Field2D<T>& field,
                     const nlohmann::json& extra = nlohmann::json::object()) {
  const RawPaths p = raw_paths(stem);
  {
    std::ofstream os(p.data, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + p.data.string());
    const auto v = field.values();
    if constexpr (std::is_same_v<T, double>) {
      write_le_doubles(os, v.data(), v.size());
    } else {
      write_le_doubles(os, reinterpret_cast<const double*>(v.data()),
                       2 * v.size());
    }
  }
  nlohmann::json m{
      {"n", field.grid().n()},
      {"extent", field.grid().extent()},
      {"kind", std::is_same_v<T, double> ? "real" : "complex-interleaved"},
      {"data", p.data.filename().string()},
      {"extra", extra},
  };
  write_json_file(p.manifest, m);
  return p;
}

template <class T>
struct LoadedField {
  Field2D<T> field;
  nlohmann::json extra;
};

/// Reads a field given the path of its JSON manifest.
template <class T>
LoadedField<T> read_field(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) {
    throw ValidationError("missing manifest " + manifest_path.string());
  }
  const nlohmann::json m = read_json_file(manifest_path);
  const std::string want =
      std::is_same_v<T, double> ? "real" : "complex-interleaved";
  try {
    if (m.at("kind").get<std::string>() != want) {
      throw ValidationError(manifest_path.string() + ": expected kind " + want);
    }
    const Grid2D grid(m.at("n").get<int>(), m.at("extent").get<double>());
    const fs::path data =
        manifest_path.parent_path() / m.at("data").get<std::string>();
    std::ifstream is(data, std::ios::binary);
    if (!is) throw ValidationError("cannot open " + data.string());
    const std::size_t per = std::is_same_v<T, double> ? 1 : 2;
    std::vector<double> raw = read_le_doubles(is, grid.size() * per);
    std::vector<T> values(grid.size());
    std::memcpy(values.data(), raw.data(), raw.size() * sizeof(double));
    return {Field2D<T>(grid, std::move(values)),
            m.value("extra", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
}

}  // namespace ctfpw::io
