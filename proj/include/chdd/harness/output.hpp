#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chdd/harness/run.hpp"

namespace chdd::harness {

namespace detail {

inline void write_metadata(std::ostream& os, const ExperimentSpec& s,
                           const std::vector<std::pair<std::string, std::string>>& info = {}) {
  for (const auto& [k, v] : s.to_kv()) os << "# " << k << " = " << v << '\n';
  for (const auto& [k, v] : info) os << "# " << k << " = " << v << '\n';
}

inline void write_wall_time(std::ostream& os, double t) { os << "# wall_time_s = " << format_double(t) << '\n'; }

}  // namespace detail

// Error curve (k,error[,bound_alpha,bound_beta]) or, for monodomain runs,
// step,mass,energy.
inline std::string curve_csv(const RunResult& r) {
  std::ostringstream os;
  std::vector<std::pair<std::string, std::string>> info = r.info;
  if (r.spec.method != "monodomain") {
    info.emplace_back("info.iterations", std::to_string(r.report.iterations));
    info.emplace_back("info.converged", r.report.converged ? "true" : "false");
    bool monotone = true;
    for (std::size_t k = 1; k < r.report.errors.size(); ++k)
      if (r.report.errors[k] > r.report.errors[k - 1]) monotone = false;
    info.emplace_back("info.monotone", monotone ? "true" : "false");
  }
  detail::write_metadata(os, r.spec, info);
  if (r.spec.method == "monodomain") {
    os << "step,mass,energy\n";
    for (std::size_t n = 0; n < r.mass.size(); ++n)
      os << n << ',' << format_double(r.mass[n]) << ',' << format_double(r.energy[n]) << '\n';
  } else {
    os << (r.has_bounds() ? "k,error,bound_alpha,bound_beta\n" : "k,error\n");
    for (std::size_t k = 0; k < r.report.errors.size(); ++k) {
      os << k << ',' << format_double(r.report.errors[k]);
      if (r.has_bounds()) os << ',' << format_double(r.bound_alpha[k]) << ',' << format_double(r.bound_beta[k]);
      os << '\n';
    }
  }
  detail::write_wall_time(os, r.wall_time_s);
  return os.str();
}

inline std::string table_csv(const TableResult& t) {
  std::ostringstream os;
  detail::write_metadata(os, t.base);
  os << "h,theta_or_sd,dt,iters\n";
  for (const auto& row : t.rows) {
    os << format_double(row.h) << ',' << format_double(row.theta_or_sd) << ',' << format_double(row.dt) << ',';
    if (row.converged) {
      os << row.iterations;
    } else {
      os << t.base.max_iter << '+';
    }
    os << '\n';
  }
  detail::write_wall_time(os, t.wall_time_s);
  return os.str();
}

enum class PlotKind { error, error_and_bounds, diagnostics, table };

inline std::string plot_script(const std::string& csv_name, PlotKind kind, bool has_bounds = false) {
  std::ostringstream os;
  os << "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";
  switch (kind) {
    case PlotKind::error:
    case PlotKind::error_and_bounds:
      if (kind == PlotKind::error_and_bounds)
        require(has_bounds, "the run has no bound columns to plot");
      os << "set logscale y\nset xlabel 'k'\nset ylabel 'error'\n";
      os << "plot '" << csv_name << "' using 1:2 with linespoints";
      if (kind == PlotKind::error_and_bounds)
        os << ", '' using 1:3 with lines, '' using 1:4 with lines";
      os << '\n';
      break;
    case PlotKind::diagnostics:
      os << "set xlabel 'step'\nset multiplot layout 2,1\n";
      os << "plot '" << csv_name << "' using 1:2 with lines\n";
      os << "plot '" << csv_name << "' using 1:3 with lines\nunset multiplot\n";
      break;
    case PlotKind::table:
      os << "set xlabel 'theta or sd'\nset ylabel 'iterations'\n";
      os << "plot '" << csv_name << "' using 2:4 with points\n";
      break;
  }
  return os.str();
}

inline PlotKind plot_kind(const RunResult& r) {
  if (r.spec.method == "monodomain") return PlotKind::diagnostics;
  return r.has_bounds() ? PlotKind::error_and_bounds : PlotKind::error;
}

// Writes text with LF line endings; throws on I/O failure.
inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.close();
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace chdd::harness
