#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "chdd/chdd.hpp"

namespace fs = std::filesystem;
using namespace chdd;
using namespace chdd::harness;

namespace {

int run_table(const Preset& preset, const ExperimentSpec& spec, const fs::path& out) {
  const TableResult t = sweep(preset.name, spec, *preset.table);
  const std::string csv = preset.name + ".csv";
  write_file(out / csv, table_csv(t));
  write_file(out / (preset.name + ".gp"), plot_script(csv, PlotKind::table));
  std::cout << preset.name << ": " << t.rows.size() << " cells in " << t.wall_time_s << " s\n";
  std::cout << "h,theta_or_sd,dt,iters\n";
  for (const auto& r : t.rows)
    std::cout << format_double(r.h) << ',' << r.theta_or_sd << ',' << r.dt << ','
              << (r.converged ? std::to_string(r.iterations) : std::to_string(spec.max_iter) + "+") << '\n';
  std::cout << "wrote " << (out / csv).string() << '\n';
  return t.all_converged() ? kSuccess : kNotConverged;
}

int run_single(const ExperimentSpec& spec, const fs::path& out) {
  const RunResult r = run(spec);
  const std::string name = spec.preset.empty() ? spec.method : spec.preset;
  const std::string csv = name + ".csv";
  write_file(out / csv, curve_csv(r));
  write_file(out / (name + ".gp"), plot_script(csv, plot_kind(r), r.has_bounds()));
  if (spec.method == "monodomain") {
    std::cout << "monodomain: " << spec.steps << " steps, mass " << format_double(r.mass.front()) << " -> "
              << format_double(r.mass.back()) << ", energy " << format_double(r.energy.front()) << " -> "
              << format_double(r.energy.back()) << '\n';
  } else {
    std::cout << spec.method << ": " << (r.report.converged ? "converged" : "not converged") << " after "
              << r.report.iterations << " iterations, final error "
              << format_double(r.report.errors.back()) << '\n';
    for (const auto& [k, v] : r.info) std::cout << "  " << k << " = " << v << '\n';
  }
  std::cout << "wrote " << (out / csv).string() << '\n';
  return r.converged() ? kSuccess : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain decomposition experiments for the linearized Cahn-Hilliard step"};
  app.set_help_flag("--help", "print this help");
  std::optional<std::string> method, preset, config;
  std::string out = ".";
  // Option values are applied through ExperimentSpec::set after the preset
  // and the config file, so flags always win.
  std::map<std::string, std::optional<std::string>> values;
  const std::vector<std::pair<std::string, std::string>> flags{
      {"dim", "1 or 2"},
      {"domain", "a,b or a,b,y0,y1"},
      {"split", "interior breakpoints x1,..."},
      {"sd", "number of subdomains"},
      {"theta", "relaxation parameter"},
      {"h", "mesh size"},
      {"hx", "mesh size in x (2D)"},
      {"hy", "mesh size in y (2D)"},
      {"dt", "time step"},
      {"eps", "interface parameter"},
      {"c", "linearization constant"},
      {"c-mode", "frozen or field"},
      {"ybc", "neumann or dirichlet walls in y (2D)"},
      {"path", "direct or modes (2D)"},
      {"tol", "stopping tolerance"},
      {"max-iter", "iteration cap"},
      {"seed", "seed of the random initial guess"},
      {"guess-scale", "amplitude of the random initial guess"},
      {"steps", "time steps for monodomain runs"}};
  app.add_option("method", method, "dn, nn or monodomain")->check(CLI::IsMember({"dn", "nn", "monodomain"}));
  for (const auto& [name, help] : flags) app.add_option("--" + name, values[name], help);
  bool unequal = false, swap = false, list = false;
  app.add_flag("--unequal", unequal, "alternating widths d, 2d");
  app.add_flag("--swap", swap, "Dirichlet step on the right subdomain");
  app.add_option("--preset", preset, "named experiment");
  app.add_option("--config", config, "key = value file");
  app.add_option("--out", out, "output directory");
  app.add_flag("--list-presets", list, "print preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInvalidSpec;
  }

  if (list) {
    for (const auto& p : presets()) std::cout << p.name << '\n';
    return kSuccess;
  }

  try {
    ExperimentSpec spec;
    std::optional<Preset> chosen;
    if (preset) {
      chosen = find_preset(*preset);
      spec = chosen->spec;
    }
    if (config) apply_config_file(spec, *config);
    if (method) spec.set("method", *method);
    for (const auto& [name, v] : values) {
      if (!v) continue;
      std::string key = name;
      std::replace(key.begin(), key.end(), '-', '_');
      spec.set(key, *v);
    }
    if (unequal) spec.unequal = true;
    if (swap) spec.swap = true;
    spec.validate();
    require(method || preset || config, "give a method, a preset or a config file");
    if (chosen && chosen->table) return run_table(*chosen, spec, out);
    return run_single(spec, out);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return kInvalidSpec;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}
