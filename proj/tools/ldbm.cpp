#include <algorithm>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ldbm/error.hpp"

namespace {

using ldbm::cli::ordered_json;

// --grid-half-width for grid_half_width, and so on.
std::string flag_name(const std::string& key) {
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return "--" + flag;
}

struct Common {
  std::string config_file;
  std::map<std::string, std::string> overrides;
  bool relaxed = false;
};

void add_common(CLI::App* app, Common& common) {
  app->add_option("-c,--config", common.config_file, "key = value config file")->check(CLI::ExistingFile);
  for (const std::string& key : ldbm::config_keys()) {
    if (key == "allow_relaxed_alpha") continue;
    app->add_option_function<std::string>(
        flag_name(key), [&common, key](const std::string& v) { common.overrides[key] = v; }, "config key " + key);
  }
  app->add_flag("--allow-relaxed-alpha", common.relaxed, "admit weight exponents alpha in (-2, inf)");
}

ldbm::RunConfig resolve(const Common& common) {
  ldbm::RawConfig raw;
  if (!common.config_file.empty()) raw = ldbm::read_config_file(common.config_file);
  for (const auto& [k, v] : common.overrides) raw[k] = v;
  if (common.relaxed) raw["allow_relaxed_alpha"] = "true";
  return ldbm::validate_config(raw);
}

int report_error(const char* type, const std::exception& e, int code) {
  ordered_json err = {{"error", {{"type", type}, {"message", e.what()}}}};
  std::cerr << err.dump(2) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouville distorted Brownian motion toolkit"};
  app.require_subcommand(1);
  Common common;

  ldbm::cli::KernelTableArgs kernel;
  auto* kt = app.add_subcommand("kernel-table", "tabulate k_m, the layer covariance and the truncated Green function");
  add_common(kt, common);
  kt->add_option("--r-min", kernel.r_min);
  kt->add_option("--r-max", kernel.r_max);
  kt->add_option("--count", kernel.count);
  kt->add_option("--method", kernel.method)->check(CLI::IsMember({"quadrature", "bessel"}));
  kt->add_option("-o,--out", kernel.out, "CSV output (default stdout)");

  ldbm::cli::FieldArgs field;
  auto* sf = app.add_subcommand("sample-field", "sample X_n and write it as a binary grid");
  add_common(sf, common);
  sf->add_option("-o,--out", field.out);
  sf->add_option("--draw", field.draw);

  ldbm::cli::MeasureArgs measure;
  auto* bm = app.add_subcommand("build-measure", "build the regularized chaos density");
  add_common(bm, common);
  bm->add_option("--field", measure.field, "binary field grid to read")->check(CLI::ExistingFile);
  bm->add_option("-o,--out", measure.out);
  bm->add_flag("--no-weight", measure.no_weight, "omit rho = |x|^alpha");

  ldbm::cli::DbmArgs dbm;
  auto* sd = app.add_subcommand("simulate-dbm", "simulate one distorted Brownian motion path");
  add_common(sd, common);
  sd->add_option("-o,--out", dbm.out, "trajectory CSV");
  sd->add_option("--index", dbm.index, "path stream index");

  bool resume = false;
  auto* lr = app.add_subcommand("liouville-run", "field, measure, paths, clocks and time change");
  add_common(lr, common);
  lr->add_flag("--resume", resume, "skip work when a complete manifest of the same inputs exists");

  ldbm::cli::ResolventArgs resolvent;
  auto* er = app.add_subcommand("estimate-resolvent", "Monte Carlo 1-potential over a polar probe lattice");
  add_common(er, common);
  er->add_option("--domain-k", resolvent.domain_k);
  er->add_option("--resolvent-paths", resolvent.resolvent_paths, "paths for the kernel estimate (extended tier)");
  er->add_option("--delta", resolvent.delta);

  ldbm::cli::S00Args s00;
  auto* cs = app.add_subcommand("check-s00", "boundedness diagnostics on nested levels n and n+1");
  add_common(cs, common);
  cs->add_option("--domain-k", s00.domain_k);
  cs->add_option("--delta", s00.delta);
  cs->add_option("--probe-x", s00.probe_x);
  cs->add_option("--probe-y", s00.probe_y);
  cs->add_option("--shell-radius", s00.shell_radius);

  auto* ct = app.add_subcommand("consistency-test", "compare clocks killed on E_k and E_{k+1}");
  add_common(ct, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const ldbm::RunConfig config = resolve(common);
    ordered_json report;
    int code = 0;
    if (*kt)
      code = ldbm::cli::kernel_table(config, kernel, report);
    else if (*sf)
      code = ldbm::cli::sample_field(config, field, report);
    else if (*bm)
      code = ldbm::cli::build_measure(config, measure, report);
    else if (*sd)
      code = ldbm::cli::simulate_dbm(config, dbm, report);
    else if (*lr)
      code = ldbm::cli::liouville_run(config, resume, report);
    else if (*er)
      code = ldbm::cli::estimate_resolvent(config, resolvent, report);
    else if (*cs)
      code = ldbm::cli::check_s00(config, s00, report);
    else if (*ct)
      code = ldbm::cli::consistency_test(config, report);
    if (*kt && kernel.out.empty())
      std::cerr << report.dump(2) << '\n';
    else
      std::cout << report.dump(2) << '\n';
    return code;
  } catch (const ldbm::ConfigError& e) {
    return report_error("config", e, 2);
  } catch (const ldbm::DomainError& e) {
    return report_error("domain", e, 3);
  } catch (const ldbm::ContractError& e) {
    return report_error("contract", e, 3);
  } catch (const ldbm::IndexError& e) {
    return report_error("index", e, 3);
  } catch (const ldbm::NumericalError& e) {
    return report_error("numerical", e, 4);
  } catch (const ldbm::ResolutionError& e) {
    return report_error("resolution", e, 3);
  } catch (const std::exception& e) {
    return report_error("runtime", e, 5);
  }
}
