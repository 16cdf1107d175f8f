#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "ldbm/config.hpp"

namespace ldbm::cli {

using nlohmann::ordered_json;

struct KernelTableArgs {
  double r_min = 1e-3;
  double r_max = 10.0;
  std::size_t count = 50;
  std::string method = "quadrature";
  std::string out;  // empty: stdout
};

struct FieldArgs {
  std::string out;   // default <output_dir>/field.ldg
  std::uint32_t draw = 0;
};

struct MeasureArgs {
  std::string field;  // read this field instead of sampling
  std::string out;    // default <output_dir>/density.ldg
  bool no_weight = false;
};

struct DbmArgs {
  std::string out;  // default <output_dir>/path.csv
  std::uint32_t index = 0;
};

struct ResolventArgs {
  int domain_k = 3;
  std::size_t resolvent_paths = 10000;
  double delta = 0.25;
};

struct S00Args {
  int domain_k = 3;
  double delta = 0.25;
  double probe_x = 0.5;
  double probe_y = 0.0;
  double shell_radius = 0.5;
};

/// Each command returns the process exit code and sets `report` to the JSON written to stdout.
int kernel_table(const RunConfig& config, const KernelTableArgs& args, ordered_json& report);
int sample_field(const RunConfig& config, const FieldArgs& args, ordered_json& report);
int build_measure(const RunConfig& config, const MeasureArgs& args, ordered_json& report);
int simulate_dbm(const RunConfig& config, const DbmArgs& args, ordered_json& report);
int liouville_run(const RunConfig& config, bool resume, ordered_json& report);
int estimate_resolvent(const RunConfig& config, const ResolventArgs& args, ordered_json& report);
int check_s00(const RunConfig& config, const S00Args& args, ordered_json& report);
int consistency_test(const RunConfig& config, ordered_json& report);

}  // namespace ldbm::cli
