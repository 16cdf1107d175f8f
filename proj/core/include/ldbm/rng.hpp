#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

namespace ldbm {

/// Identifies one independent random stream: (master seed, stream label, draw index).
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t label = 0;
  std::uint32_t index = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

std::string to_string(const StreamKey& key);

/// Stream label families. Every random draw in the library is taken from a
/// Philox stream whose label comes from one of these.
namespace streams {
inline constexpr std::uint32_t kFieldLayerBase = 0x0001'0000u;
inline constexpr std::uint32_t kPathBase = 0x0002'0000u;
inline constexpr std::uint32_t kPotentialBase = 0x0003'0000u;
inline constexpr std::uint32_t kResolventBase = 0x0004'0000u;
inline constexpr std::uint32_t kAuxiliaryBase = 0x000F'0000u;

constexpr std::uint32_t field_layer(int layer) { return kFieldLayerBase + static_cast<std::uint32_t>(layer); }
constexpr std::uint32_t path(std::uint32_t purpose = 0) { return kPathBase + purpose; }
constexpr std::uint32_t potential(std::uint32_t probe) { return kPotentialBase + probe; }
constexpr std::uint32_t resolvent(std::uint32_t purpose = 0) { return kResolventBase + purpose; }
constexpr std::uint32_t auxiliary(std::uint32_t purpose = 0) { return kAuxiliaryBase + purpose; }
}  // namespace streams

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit master seed is the key; counter words 0-1 hold the block
/// number, word 2 the stream label and word 3 the draw index, so distinct
/// StreamKeys never share a counter block.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(const StreamKey& key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (position_ == 4) refill();
    return buffer_[position_++];
  }

  /// Raw bijection: ten rounds applied to `counter` under `key`.
  static Block encrypt(Block counter, Key key);

 private:
  void refill();

  Key key_;
  std::uint32_t label_;
  std::uint32_t index_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int position_ = 4;
};

}  // namespace ldbm
