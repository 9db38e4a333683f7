#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chdd/core.hpp"

namespace chdd::harness {

inline std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("bad number for " + key + ": '" + v + "'");
  }
  require(pos == v.size() && std::isfinite(x), "bad number for " + key + ": '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  require(x == std::floor(x), "expected an integer for " + key + ": '" + v + "'");
  return static_cast<long long>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("bad boolean for " + key + ": '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

// Everything needed to reproduce one experiment.
struct ExperimentSpec {
  std::string method = "dn";  // dn | nn | monodomain
  int dim = 1;
  std::vector<double> domain{0.0, 1.0};  // a,b[,y0,y1]
  std::vector<double> split;             // interior breakpoints
  int sd = 2;
  bool unequal = false;
  bool swap = false;
  std::optional<double> theta;
  double h = 1.0 / 64;
  std::optional<double> hx;
  double hy = 1.0 / 32;
  double dt = 1e-6;
  double eps = 0.01;
  double c = 1.0;
  std::string c_mode = "frozen";  // frozen | field
  std::string ybc = "neumann";    // neumann | dirichlet
  std::string path = "direct";    // direct | modes
  double tol = 1e-6;
  int max_iter = 500;
  std::uint64_t seed = 42;
  double guess_scale = 1.0;
  int steps = 200;
  std::string preset;

  bool operator==(const ExperimentSpec&) const = default;

  double effective_theta() const { return theta.value_or(method == "nn" ? 0.25 : 0.5); }
  double effective_hx() const { return hx.value_or(h); }

  Params params() const { return Params{eps, dt, c, effective_theta()}; }

  void set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "method") method = v;
    else if (key == "dim") dim = static_cast<int>(parse_int(key, v));
    else if (key == "domain") domain = parse_list(key, v);
    else if (key == "split") split = parse_list(key, v);
    else if (key == "sd") sd = static_cast<int>(parse_int(key, v));
    else if (key == "unequal") unequal = parse_bool(key, v);
    else if (key == "swap") swap = parse_bool(key, v);
    else if (key == "theta") theta = parse_double(key, v);
    else if (key == "h") h = parse_double(key, v);
    else if (key == "hx") hx = parse_double(key, v);
    else if (key == "hy") hy = parse_double(key, v);
    else if (key == "dt") dt = parse_double(key, v);
    else if (key == "eps") eps = parse_double(key, v);
    else if (key == "c") c = parse_double(key, v);
    else if (key == "c_mode") c_mode = v;
    else if (key == "ybc") ybc = v;
    else if (key == "path") path = v;
    else if (key == "tol") tol = parse_double(key, v);
    else if (key == "max_iter") max_iter = static_cast<int>(parse_int(key, v));
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "guess_scale") guess_scale = parse_double(key, v);
    else if (key == "steps") steps = static_cast<int>(parse_int(key, v));
    else if (key == "preset") preset = v;
    else throw InvalidArgument("unknown key '" + key + "'");
  }

  // Deterministic key order; optional values only when set.
  std::vector<std::pair<std::string, std::string>> to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv{
        {"method", method}, {"dim", std::to_string(dim)}, {"domain", format_list(domain)},
        {"split", format_list(split)}, {"sd", std::to_string(sd)}, {"unequal", unequal ? "true" : "false"},
        {"swap", swap ? "true" : "false"}};
    if (theta) kv.emplace_back("theta", format_double(*theta));
    kv.emplace_back("h", format_double(h));
    if (hx) kv.emplace_back("hx", format_double(*hx));
    kv.insert(kv.end(), {{"hy", format_double(hy)},
                         {"dt", format_double(dt)},
                         {"eps", format_double(eps)},
                         {"c", format_double(c)},
                         {"c_mode", c_mode},
                         {"ybc", ybc},
                         {"path", path},
                         {"tol", format_double(tol)},
                         {"max_iter", std::to_string(max_iter)},
                         {"seed", std::to_string(seed)},
                         {"guess_scale", format_double(guess_scale)},
                         {"steps", std::to_string(steps)},
                         {"preset", preset}});
    return kv;
  }

  void validate() const {
    require(method == "dn" || method == "nn" || method == "monodomain", "method must be dn, nn or monodomain");
    require(dim == 1 || dim == 2, "dim must be 1 or 2");
    require(domain.size() == (dim == 1 ? 2u : 4u), dim == 1 ? "domain needs a,b" : "domain needs a,b,y0,y1");
    require(domain[1] > domain[0], "domain must satisfy a < b");
    if (dim == 2) require(domain[3] > domain[2], "domain must satisfy y0 < y1");
    require(h > 0 && hy > 0 && (!hx || *hx > 0), "grid spacings must be positive");
    require(dt > 0 && eps > 0 && std::isfinite(c), "dt and eps must be positive");
    if (theta) require(*theta > 0 && *theta < 1, "theta must lie in (0,1)");
    require(tol > 0, "tol must be positive");
    require(max_iter >= 1, "max_iter must be at least 1");
    require(sd >= 2, "sd must be at least 2");
    require(steps >= 1, "steps must be at least 1");
    require(guess_scale > 0, "guess_scale must be positive");
    require(c_mode == "frozen" || c_mode == "field", "c_mode must be frozen or field");
    require(ybc == "neumann" || ybc == "dirichlet", "ybc must be neumann or dirichlet");
    require(path == "direct" || path == "modes", "path must be direct or modes");
    if (method == "dn") require(split.size() <= 1, "Dirichlet-Neumann takes a single split point");
    for (double x : split) require(x > domain[0] && x < domain[1], "split points must lie inside the domain");
  }
};

// Flat "key = value" lines; '#' starts a comment.
inline void apply_config_text(ExperimentSpec& spec, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(n) + " has no '='");
    spec.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void apply_config_file(ExperimentSpec& spec, const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(spec, ss.str());
}

// Reads the "# key = value" block written at the top of every CSV.
inline ExperimentSpec spec_from_metadata(const std::string& csv) {
  ExperimentSpec spec;
  spec.theta.reset();
  spec.hx.reset();
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(2, eq - 2));
    if (key == "wall_time_s" || key.rfind("info.", 0) == 0) continue;
    spec.set(key, line.substr(eq + 1));
  }
  return spec;
}

}  // namespace chdd::harness
