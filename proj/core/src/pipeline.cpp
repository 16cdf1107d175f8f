#include "ldbm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ldbm/chaos.hpp"
#include "ldbm/error.hpp"
#include "ldbm/gff.hpp"
#include "ldbm/grid_io.hpp"

namespace ldbm {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["allow_relaxed_alpha"] = c.allow_relaxed_alpha;
  j["mass"] = c.mass;
  j["cutoffs"] = c.cutoffs == "dyadic" ? ordered_json("dyadic") : ordered_json(c.cutoff_values);
  j["level"] = c.level;
  j["grid_half_width"] = c.grid_half_width;
  j["grid_cells"] = c.grid_cells;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["annuli"] = c.annuli;
  j["ensemble"] = c.ensemble;
  j["seed"] = c.seed;
  j["start"] = {c.start.x, c.start.y};
  j["output_dir"] = c.output_dir;
  j["tier"] = to_string(c.tier);
  j["output_stride"] = c.output_stride;
  j["z_points"] = c.z_points;
  return j;
}

ordered_json exit_json(double t) { return std::isinf(t) ? ordered_json(nullptr) : ordered_json(t); }

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  std::ostringstream os;
  os << stem << '_';
  os.width(4);
  os.fill('0');
  os << i << ext;
  return os.str();
}

}  // namespace

void write_trajectory_csv(const fs::path& path, const PathSample& sample, std::size_t stride) {
  auto out = open_output(path);
  out << "t,x,y\n";
  const std::size_t n = sample.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % stride != 0 && i + 1 != n) continue;
    const Point p = sample.points[i];
    out << format_number(sample.time(i)) << ',' << format_number(p.x) << ',' << format_number(p.y) << '\n';
  }
}

void write_clock_csv(const fs::path& path, const ClockSample& clock, std::size_t stride) {
  auto out = open_output(path);
  out << "t,F\n";
  const std::size_t n = clock.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % stride != 0 && i + 1 != n) continue;
    out << format_number(clock.time(i)) << ',' << format_number(clock.values[i]) << '\n';
  }
}

void write_points_csv(const fs::path& path, std::span<const double> times, std::span<const Point> points) {
  if (times.size() != points.size()) throw ContractError("write_points_csv: times and points differ in length");
  auto out = open_output(path);
  out << "t,x,y\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    out << format_number(times[i]) << ',' << format_number(points[i].x) << ',' << format_number(points[i].y) << '\n';
}

std::string input_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_text(config)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

PipelineResult run_pipeline(const RunConfig& config, const PipelineOptions& options) {
  check_subcritical(config.gamma);
  PipelineResult result;
  result.input_hash = input_hash(config);
  const fs::path dir(config.output_dir);
  result.manifest = dir / "manifest.json";

  if (options.resume && fs::exists(result.manifest)) {
    std::ifstream in(result.manifest);
    const ordered_json old = ordered_json::parse(in, nullptr, false);
    if (!old.is_discarded() && old.value("complete", false) && old.value("input_hash", "") == result.input_hash) {
      result.resumed = true;
      result.passed = old.value("passed", false);
      for (const auto& c : old.at("checks"))
        result.checks.push_back({c.at("name"), c.at("passed"), c.at("value"), c.at("tolerance"), c.at("detail")});
      for (const auto& n : old.at("notes")) result.notes.push_back(n);
      return result;
    }
  }
  fs::create_directories(dir);
  fs::remove(result.manifest);

  // Field and measure.
  const GridSpec grid = config.grid();
  const FieldSampler sampler(grid, config.sequence(), config.mass_param());
  const FieldState field = sampler.sample(config.level, config.seed, 0);
  write_grid(dir / "field.ldg", {field.grid, static_cast<std::uint32_t>(field.level), field.variance, field.seed,
                                 field.values});
  const ChaosDensity density =
      build_regularized_measure(field, config.gamma, WeightSpec(config.alpha, config.allow_relaxed_alpha));
  write_grid(dir / "density.ldg", {density.grid, static_cast<std::uint32_t>(density.level), density.variance,
                                   field.seed, density.density});
  const double total_mass = measure_of_set(density, grid.bounds()).mass;

  PathOptions path_options;
  path_options.dt = config.dt;
  path_options.horizon = config.horizon;
  path_options.alpha = config.alpha;
  path_options.annuli = config.annuli;
  for (int k : config.annuli) path_options.annuli.push_back(k + 1);
  std::sort(path_options.annuli.begin(), path_options.annuli.end());
  path_options.annuli.erase(std::unique(path_options.annuli.begin(), path_options.annuli.end()),
                            path_options.annuli.end());

  CheckResult monotone{"clock_strictly_increasing", true, 0.0, 0.0, ""};
  CheckResult consistency{"annulus_consistency", true, 0.0, 1e-12, "max |F^k - F^{k+1}| / (1 + F^k) before exit from E_k"};
  CheckResult round_trip{"clock_round_trip", true, 0.0, 1e-10, "max |F(F^{-1}(tau)) - tau|"};
  CheckResult identity{"identity_time_change", true, 0.0, 1e-10, "max |Z_t - X_t| with gamma = 0"};
  CheckResult guard{"origin_guard_flags", true, 0.0, 0.0, "steps still inside the origin guard after substepping"};

  ordered_json paths = ordered_json::array();
  ordered_json artifacts = {"field.ldg", "density.ldg"};
  for (std::size_t p = 0; p < config.ensemble; ++p) {
    const StreamKey key{config.seed, streams::path(), static_cast<std::uint32_t>(p)};
    const PathSample path = simulate_path(config.start, path_options, key);
    const ClockSample clock = accumulate_pcaf(path, field, config.gamma);

    std::size_t alive = clock.size();
    if (!std::isinf(clock.frozen_at)) alive = static_cast<std::size_t>(std::llround((clock.frozen_at - clock.start_time) / clock.dt));
    for (std::size_t i = 1; i < alive; ++i) {
      if (!(clock.values[i] > clock.values[i - 1])) {
        monotone.passed = false;
        monotone.detail = "nonpositive increment on path " + std::to_string(p);
        break;
      }
    }

    ordered_json consistency_json = ordered_json::object();
    for (int k : config.annuli) {
      if (!AnnulusDomain(k).contains(config.start)) {
        result.notes.push_back("start point outside E_" + std::to_string(k) + "; consistency check skipped");
        continue;
      }
      const ConsistencyResult r = consistency_check(path, field, config.gamma, k);
      const double rel = r.residual / (1.0 + r.scale);
      consistency.value = std::max(consistency.value, rel);
      consistency.passed = consistency.passed && r.passed;
      consistency_json[std::to_string(k)] = {{"residual", r.residual}, {"scale", r.scale}, {"passed", r.passed}};
    }

    const double end = clock.final_value();
    std::vector<double> readings(config.z_points);
    for (std::size_t j = 0; j < readings.size(); ++j)
      readings[j] = end * static_cast<double>(j) / static_cast<double>(readings.size());
    const std::vector<Point> z = time_change(path, clock, readings);
    for (double tau : readings)
      round_trip.value = std::max(round_trip.value, std::abs(clock.value_at(invert_clock(clock, tau)) - tau));
    if (config.gamma == 0.0) {
      for (std::size_t j = 0; j < readings.size(); ++j)
        identity.value = std::max(identity.value, distance(z[j], path_position(path, readings[j])));
    }
    guard.value += static_cast<double>(path.guard_flags);

    const std::string path_file = indexed("path", p, ".csv");
    const std::string clock_file = indexed("clock", p, ".csv");
    const std::string z_file = indexed("z", p, ".csv");
    write_trajectory_csv(dir / path_file, path, config.output_stride);
    write_clock_csv(dir / clock_file, clock, config.output_stride);
    write_points_csv(dir / z_file, readings, z);
    artifacts.push_back(path_file);
    artifacts.push_back(clock_file);
    artifacts.push_back(z_file);

    ordered_json exits = ordered_json::object();
    for (const auto& [k, e] : path.exits) exits[std::to_string(k)] = {{"sigma", exit_json(e.sigma)}, {"hitting", exit_json(e.hitting)}};
    paths.push_back({{"index", p},
                     {"stream", {{"seed", key.seed}, {"label", key.label}, {"index", key.index}}},
                     {"exits", exits},
                     {"guard_events", path.guard_events},
                     {"guard_flags", path.guard_flags},
                     {"clock_final", end},
                     {"clock_frozen_at", exit_json(clock.frozen_at)},
                     {"left_grid", clock.left_grid},
                     {"consistency", consistency_json}});
  }
  round_trip.passed = round_trip.value <= round_trip.tolerance;
  guard.passed = config.alpha < 2.0 || guard.value == 0.0;
  result.checks = {monotone, consistency, round_trip, guard};
  if (config.gamma == 0.0) {
    identity.passed = identity.value <= identity.tolerance;
    result.checks.push_back(identity);
    if (identity.passed) result.notes.push_back("identity time change verified");
  }
  result.passed = std::all_of(result.checks.begin(), result.checks.end(), [](const CheckResult& c) { return c.passed; });

  ordered_json layers = ordered_json::array();
  for (int n = 1; n <= config.level; ++n)
    layers.push_back({{"layer", n}, {"seed", config.seed}, {"label", streams::field_layer(n)}, {"index", 0}});
  ordered_json checks = ordered_json::array();
  for (const auto& c : result.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});

  ordered_json manifest;
  manifest["tool"] = "ldbm";
  manifest["version"] = kVersion;
  manifest["input_hash"] = result.input_hash;
  manifest["config"] = config_json(config);
  manifest["config_text"] = canonical_text(config);
  manifest["streams"] = {{"master_seed", config.seed},
                         {"field_layers", layers},
                         {"paths", {{"seed", config.seed}, {"label", streams::path()}, {"index_range", {0, config.ensemble}}}}};
  manifest["field"] = {{"level", field.level}, {"variance", field.variance}, {"cutoffs", config.sequence().describe()},
                       {"grid", {{"origin", {grid.origin().x, grid.origin().y}},
                                 {"extent", {grid.extent_x(), grid.extent_y()}},
                                 {"cells", {grid.nx(), grid.ny()}}}}};
  manifest["measure"] = {{"gamma", config.gamma}, {"alpha", config.alpha}, {"total_mass", total_mass}};
  manifest["paths"] = paths;
  manifest["checks"] = checks;
  manifest["notes"] = result.notes;
  manifest["artifacts"] = artifacts;
  manifest["passed"] = result.passed;
  manifest["complete"] = true;
  auto out = open_output(result.manifest);
  out << manifest.dump(2) << '\n';
  return result;
}

}  // namespace ldbm
