#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chdd/harness/run.hpp"

namespace chdd::harness {

struct Preset {
  std::string name;
  ExperimentSpec spec;
  std::optional<TableAxes> table;  // set for iteration-count tables
};

namespace detail {

inline const std::vector<double> kMeshes{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
inline const std::vector<double> kThetas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
inline const std::vector<int> kSubdomains{2, 4, 8, 16, 32, 64};

inline ExperimentSpec dn_spec(double a, double b, double split) {
  ExperimentSpec s;
  s.method = "dn";
  s.domain = {a, b};
  s.split = {split};
  return s;
}

inline ExperimentSpec nn_spec(int dim, bool unequal) {
  ExperimentSpec s;
  s.method = "nn";
  s.dim = dim;
  s.domain = dim == 1 ? std::vector<double>{0.0, 20.0} : std::vector<double>{0.0, 16.0, 0.0, 1.0};
  s.unequal = unequal;
  s.theta = 0.25;
  if (dim == 2) {
    s.hy = 1.0 / 32;
    s.path = "modes";
  }
  return s;
}

}  // namespace detail

inline std::vector<Preset> presets() {
  using namespace detail;
  std::vector<Preset> out;
  auto dn_table = [&](const std::string& name, double a, double b, double split) {
    out.push_back({name, dn_spec(a, b, split), TableAxes{kMeshes, kThetas, {}, {1e-6, 1e-3}}});
  };
  dn_table("table1", 0.0, 1.0, 0.5);
  dn_table("table2", 1.0, 2.0, 1.4);
  dn_table("table3", -1.5, 1.0, 0.0);
  out.push_back({"table4", nn_spec(1, false), TableAxes{kMeshes, {}, kSubdomains, {1e-6, 1e-3}}});
  out.push_back({"table5", nn_spec(1, true), TableAxes{kMeshes, {}, kSubdomains, {1e-6, 1e-3}}});
  out.push_back({"table6_equal", nn_spec(2, false), TableAxes{kMeshes, {}, kSubdomains, {1e-6}}});
  out.push_back({"table6_unequal", nn_spec(2, true), TableAxes{kMeshes, {}, kSubdomains, {1e-6}}});

  auto curve = [&](const std::string& name, ExperimentSpec s) { out.push_back({name, std::move(s), std::nullopt}); };
  ExperimentSpec s = dn_spec(1.0, 2.0, 1.4);
  s.dt = 1e-3;
  curve("fig-dn-nld", s);
  s = dn_spec(-1.5, 1.0, 0.0);
  s.dt = 1e-3;
  curve("fig-dn-dln", s);
  s = dn_spec(0.0, 1.0, 0.5);
  s.dim = 2;
  s.domain = {0.0, 1.0, 0.0, 1.0};
  s.h = s.hy = 1.0 / 64;
  curve("fig-dn-2d", s);
  for (int sd : {32, 64}) {
    s = nn_spec(1, false);
    s.sd = sd;
    s.h = 1.0 / 512;
    s.dt = 1e-3;
    curve("fig-nn-" + std::to_string(sd) + "sd", s);
  }
  s = nn_spec(2, false);
  s.sd = 64;
  s.hx = 1.0 / 64;
  s.dt = 1e-3;
  curve("fig-nn-2d", s);
  s = ExperimentSpec{};
  s.method = "monodomain";
  s.h = 1.0 / 128;
  curve("mono", s);
  for (auto& p : out) p.spec.preset = p.name;
  return out;
}

inline Preset find_preset(const std::string& name) {
  std::string known;
  for (const auto& p : presets()) {
    if (p.name == name) return p;
    known += (known.empty() ? "" : ", ") + p.name;
  }
  throw InvalidArgument("unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace chdd::harness
