#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ldbm/covariance.hpp"
#include "ldbm/geometry.hpp"
#include "ldbm/grid.hpp"

namespace ldbm {

enum class Tier { standard, extended };

/// Parameters of one run. Every field has a key of the same name in the
/// config file (see docs/config.md).
struct RunConfig {
  double gamma = 0.5;
  double alpha = 2.0;
  bool allow_relaxed_alpha = false;
  double mass = 1.0;
  /// "dyadic" or an explicit list c_1, ..., c_N.
  std::string cutoffs = "dyadic";
  std::vector<double> cutoff_values;
  int level = 6;
  double grid_half_width = 3.5;
  int grid_cells = 56;
  double dt = 1e-4;
  double horizon = 5.0;
  std::vector<int> annuli{2, 3};
  std::size_t ensemble = 4;
  std::uint64_t seed = 1;
  Point start{1.0, 0.0};
  std::string output_dir = "ldbm-out";
  Tier tier = Tier::standard;
  /// Every k-th grid point is written to the trajectory CSVs.
  std::size_t output_stride = 10;
  /// Number of equally spaced clock readings sampled for Z.
  std::size_t z_points = 1001;

  GridSpec grid() const;
  CutoffSequence sequence() const;
  MassParam mass_param() const { return MassParam(mass); }
};

/// Raw key/value pairs in file order; later duplicates override earlier ones.
using RawConfig = std::map<std::string, std::string>;

/// Keys accepted by validate_config.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError on malformed lines.
RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::filesystem::path& path);

/// Full validation; the ConfigError message lists every violated invariant, one per line.
RunConfig validate_config(const RawConfig& raw);

/// Canonical `key = value` text of every field (all defaults filled), in config_keys() order.
std::string canonical_text(const RunConfig& config);

std::string to_string(Tier tier);

}  // namespace ldbm
