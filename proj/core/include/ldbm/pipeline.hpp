#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ldbm/clock.hpp"
#include "ldbm/config.hpp"
#include "ldbm/dbm.hpp"

namespace ldbm {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

/// CSV with header `t,x,y`, every `stride`-th point plus the last one.
void write_trajectory_csv(const std::filesystem::path& path, const PathSample& sample, std::size_t stride = 1);
/// CSV with header `t,F`.
void write_clock_csv(const std::filesystem::path& path, const ClockSample& clock, std::size_t stride = 1);
/// CSV with header `t,x,y` for explicit times.
void write_points_csv(const std::filesystem::path& path, std::span<const double> times, std::span<const Point> points);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed deviation
  double tolerance = 0.0;
  std::string detail;
};

struct PipelineOptions {
  /// Skip all work when the output directory holds a complete manifest of the same inputs.
  bool resume = false;
};

struct PipelineResult {
  bool passed = false;
  bool resumed = false;
  std::string input_hash;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  std::filesystem::path manifest;
};

/// 64-bit FNV-1a of the canonical config text, as 16 hex digits.
std::string input_hash(const RunConfig& config);

/// field -> measure -> paths -> clocks -> consistency -> time change, writing
/// every artifact and manifest.json into config.output_dir.
PipelineResult run_pipeline(const RunConfig& config, const PipelineOptions& options = {});

}  // namespace ldbm
