#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ldbm/grid.hpp"

namespace ldbm {

/// Binary grid file: a 64-byte little-endian header followed by nx * ny f64
/// values in row-major order (index j * nx + i).
///
///   offset  size  field
///        0     4  magic "LDG1"
///        4     4  level (u32)
///        8     4  nx (u32)
///       12     4  ny (u32)
///       16    16  origin x, y (f64)
///       32    16  extent x, y (f64)
///       48     8  variance log c_n (f64)
///       56     8  master seed (u64)
struct GridFile {
  GridSpec grid = GridSpec::default_grid();
  std::uint32_t level = 0;
  double variance = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

inline constexpr std::size_t kGridHeaderBytes = 64;

std::vector<unsigned char> encode_grid(const GridFile& file);
GridFile decode_grid(std::span<const unsigned char> bytes);

void write_grid(const std::filesystem::path& path, const GridFile& file);
GridFile read_grid(const std::filesystem::path& path);

}  // namespace ldbm
