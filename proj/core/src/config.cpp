#include "ldbm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ldbm/error.hpp"

namespace ldbm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") return out = true, true;
  if (s == "false" || s == "0" || s == "no") return out = false, true;
  return false;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(Tier tier) { return tier == Tier::extended ? "extended" : "default"; }

GridSpec RunConfig::grid() const {
  return GridSpec::centered_square(grid_half_width, grid_cells);
}

CutoffSequence RunConfig::sequence() const {
  return cutoffs == "dyadic" ? CutoffSequence::dyadic() : CutoffSequence::from_values(cutoff_values);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "gamma",  "alpha",   "allow_relaxed_alpha", "mass",    "cutoffs",    "level",        "grid_half_width",
      "grid_cells", "dt",  "horizon",             "annuli",  "ensemble",   "seed",         "start_x",
      "start_y", "output_dir", "tier",            "output_stride", "z_points"};
  return keys;
}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(number) + ": expected `key = value`");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(number) + ": empty key");
      continue;
    }
    raw[key] = value;
  }
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig validate_config(const RawConfig& raw) {
  RunConfig c;
  std::vector<std::string> errors;
  const auto& keys = config_keys();
  for (const auto& [key, value] : raw)
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) errors.push_back("unknown key `" + key + "`");

  const auto get = [&](const char* key) -> const std::string* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  const auto read = [&](const char* key, auto& out) {
    const std::string* v = get(key);
    if (!v) return;
    using T = std::decay_t<decltype(out)>;
    bool ok;
    if constexpr (std::is_same_v<T, bool>)
      ok = parse_bool(*v, out);
    else
      ok = parse_number(*v, out);
    if (!ok) errors.push_back("`" + std::string(key) + "`: cannot parse `" + *v + "`");
  };

  read("gamma", c.gamma);
  read("alpha", c.alpha);
  read("allow_relaxed_alpha", c.allow_relaxed_alpha);
  read("mass", c.mass);
  read("level", c.level);
  read("grid_half_width", c.grid_half_width);
  read("grid_cells", c.grid_cells);
  read("dt", c.dt);
  read("horizon", c.horizon);
  read("ensemble", c.ensemble);
  read("seed", c.seed);
  read("start_x", c.start.x);
  read("start_y", c.start.y);
  read("output_stride", c.output_stride);
  read("z_points", c.z_points);
  if (const std::string* v = get("output_dir")) c.output_dir = *v;
  if (const std::string* v = get("tier")) {
    if (*v == "default")
      c.tier = Tier::standard;
    else if (*v == "extended")
      c.tier = Tier::extended;
    else
      errors.push_back("`tier` must be `default` or `extended`");
  }
  if (const std::string* v = get("cutoffs")) {
    if (*v == "dyadic") {
      c.cutoffs = "dyadic";
    } else {
      c.cutoffs = *v;
      c.cutoff_values.clear();
      for (const auto& item : split_list(*v)) {
        double x;
        if (!parse_number(item, x)) {
          errors.push_back("`cutoffs`: expected `dyadic` or a comma separated list, got `" + *v + "`");
          c.cutoff_values.clear();
          break;
        }
        c.cutoff_values.push_back(x);
      }
    }
  }
  if (const std::string* v = get("annuli")) {
    c.annuli.clear();
    for (const auto& item : split_list(*v)) {
      int k;
      if (!parse_number(item, k)) {
        errors.push_back("`annuli`: cannot parse `" + item + "`");
        continue;
      }
      c.annuli.push_back(k);
    }
  }

  if (!(c.gamma >= 0.0 && c.gamma < 2.0)) errors.push_back("gamma must satisfy γ ∈ [0, 2)");
  if (c.allow_relaxed_alpha) {
    if (!(c.alpha > -2.0) || !std::isfinite(c.alpha)) errors.push_back("alpha must satisfy α ∈ (−2, ∞)");
  } else if (!(c.alpha >= 2.0) || !std::isfinite(c.alpha)) {
    errors.push_back("alpha must satisfy α ∈ [2, ∞) (set allow_relaxed_alpha = true for α ∈ (−2, ∞))");
  }
  if (!(c.mass > 0.0) || !std::isfinite(c.mass)) errors.push_back("mass must be positive");
  if (c.level < 1) errors.push_back("level must satisfy n ≥ 1");
  if (!(c.dt > 0.0)) errors.push_back("dt must be positive");
  if (!(c.horizon > 0.0)) errors.push_back("horizon must be positive");
  if (c.dt > 0.0 && c.horizon > 0.0) {
    const double ratio = c.horizon / c.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
      errors.push_back("horizon / dt must be an integer");
  }
  if (c.ensemble < 1) errors.push_back("ensemble must satisfy N ≥ 1");
  if (!(c.grid_half_width > 0.0)) errors.push_back("grid_half_width must be positive");
  if (c.grid_cells < 2) errors.push_back("grid_cells must be at least 2");
  if (c.output_stride < 1) errors.push_back("output_stride must be at least 1");
  if (c.z_points < 2) errors.push_back("z_points must be at least 2");
  if (c.annuli.empty()) errors.push_back("annuli must list at least one index");
  for (int k : c.annuli)
    if (k < 2) errors.push_back("annulus index " + std::to_string(k) + " must be ≥ 2");
  if (c.start.x == 0.0 && c.start.y == 0.0) errors.push_back("the start point must differ from the origin");
  if (c.cutoffs != "dyadic") {
    if (c.cutoff_values.empty()) {
      if (std::none_of(errors.begin(), errors.end(), [](const std::string& e) { return e.rfind("`cutoffs`", 0) == 0; }))
        errors.push_back("`cutoffs`: empty list");
    } else {
      try {
        const CutoffSequence seq = CutoffSequence::from_values(c.cutoff_values);
        if (c.level > seq.max_index()) errors.push_back("level exceeds the number of listed cutoffs");
      } catch (const std::exception& e) {
        errors.push_back(std::string("`cutoffs`: ") + e.what());
      }
    }
  }
  if (c.grid_half_width > 0.0) {
    for (int k : c.annuli)
      if (k >= 2 && k >= c.grid_half_width)
        errors.push_back("annulus E_" + std::to_string(k) + " does not fit inside the grid (need k < grid_half_width)");
    if (std::abs(c.start.x) >= c.grid_half_width || std::abs(c.start.y) >= c.grid_half_width)
      errors.push_back("the start point lies outside the grid");
  }

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream os;
  const auto list = [](const auto& v) {
    std::ostringstream ls;
    for (std::size_t i = 0; i < v.size(); ++i) ls << (i ? ", " : "") << v[i];
    return ls.str();
  };
  os << "gamma = " << format_double(c.gamma) << "\n"
     << "alpha = " << format_double(c.alpha) << "\n"
     << "allow_relaxed_alpha = " << (c.allow_relaxed_alpha ? "true" : "false") << "\n"
     << "mass = " << format_double(c.mass) << "\n";
  if (c.cutoffs == "dyadic") {
    os << "cutoffs = dyadic\n";
  } else {
    std::vector<std::string> values;
    for (double v : c.cutoff_values) values.push_back(format_double(v));
    os << "cutoffs = " << list(values) << "\n";
  }
  os << "level = " << c.level << "\n"
     << "grid_half_width = " << format_double(c.grid_half_width) << "\n"
     << "grid_cells = " << c.grid_cells << "\n"
     << "dt = " << format_double(c.dt) << "\n"
     << "horizon = " << format_double(c.horizon) << "\n"
     << "annuli = " << list(c.annuli) << "\n"
     << "ensemble = " << c.ensemble << "\n"
     << "seed = " << c.seed << "\n"
     << "start_x = " << format_double(c.start.x) << "\n"
     << "start_y = " << format_double(c.start.y) << "\n"
     << "output_dir = " << c.output_dir << "\n"
     << "tier = " << to_string(c.tier) << "\n"
     << "output_stride = " << c.output_stride << "\n"
     << "z_points = " << c.z_points << "\n";
  return os.str();
}

}  // namespace ldbm
