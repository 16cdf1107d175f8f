#include "ldbm/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ldbm/error.hpp"

namespace ldbm {

namespace {

constexpr unsigned char kMagic[4] = {'L', 'D', 'G', '1'};

template <typename U>
void put(std::vector<unsigned char>& out, U v) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

template <typename U>
U get(std::span<const unsigned char> in, std::size_t offset) {
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(in[offset + b]) << (8 * b);
  return v;
}

void put_f64(std::vector<unsigned char>& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::span<const unsigned char> in, std::size_t offset) {
  return std::bit_cast<double>(get<std::uint64_t>(in, offset));
}

}  // namespace

std::vector<unsigned char> encode_grid(const GridFile& file) {
  const GridSpec& g = file.grid;
  if (file.values.size() != g.node_count()) throw ContractError("grid file: value count does not match the grid");
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kGridHeaderBytes + 8 * file.values.size());
  put<std::uint32_t>(out, file.level);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny()));
  put_f64(out, g.origin().x);
  put_f64(out, g.origin().y);
  put_f64(out, g.extent_x());
  put_f64(out, g.extent_y());
  put_f64(out, file.variance);
  put<std::uint64_t>(out, file.seed);
  for (double v : file.values) put_f64(out, v);
  return out;
}

GridFile decode_grid(std::span<const unsigned char> bytes) {
  if (bytes.size() < kGridHeaderBytes) throw ContractError("grid file: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ContractError("grid file: bad magic");
  const auto nx = get<std::uint32_t>(bytes, 8);
  const auto ny = get<std::uint32_t>(bytes, 12);
  const std::size_t count = static_cast<std::size_t>(nx) * ny;
  if (nx < 1 || ny < 1 || bytes.size() != kGridHeaderBytes + 8 * count)
    throw ContractError("grid file: size does not match the header");
  GridFile file;
  file.level = get<std::uint32_t>(bytes, 4);
  file.grid = GridSpec({get_f64(bytes, 16), get_f64(bytes, 24)}, get_f64(bytes, 32), get_f64(bytes, 40),
                       static_cast<int>(nx), static_cast<int>(ny));
  file.variance = get_f64(bytes, 48);
  file.seed = get<std::uint64_t>(bytes, 56);
  file.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) file.values[i] = get_f64(bytes, kGridHeaderBytes + 8 * i);
  return file;
}

void write_grid(const std::filesystem::path& path, const GridFile& file) {
  const auto bytes = encode_grid(file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GridFile read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace ldbm
