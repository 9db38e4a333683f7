#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chdd/chdd.hpp"

using namespace chdd;
using namespace chdd::harness;
namespace fs = std::filesystem;

namespace {

std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# wall_time_s", 0) != 0) out += line + '\n';
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CHDD_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("chdd_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("spec keys, validation and config overrides", "[harness]") {
  ExperimentSpec s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.effective_theta() == 0.5);
  s.set("method", "nn");
  CHECK(s.effective_theta() == 0.25);
  s.set("domain", " 0, 20 ");
  CHECK(s.domain == std::vector<double>{0, 20});
  CHECK_THROWS_AS(s.set("bogus", "1"), InvalidArgument);
  CHECK_THROWS_AS(s.set("h", "abc"), InvalidArgument);
  CHECK_THROWS_AS(s.set("sd", "2.5"), InvalidArgument);

  apply_config_text(s, "# comment\nsd = 8\n theta = 0.3  # trailing\n\nunequal = true\n");
  CHECK(s.sd == 8);
  CHECK(*s.theta == 0.3);
  CHECK(s.unequal);
  s.set("theta", "0.4");
  CHECK(*s.theta == 0.4);
  CHECK_THROWS_AS(apply_config_text(s, "no equals sign"), InvalidArgument);

  ExperimentSpec bad;
  bad.theta = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ExperimentSpec{};
  bad.split = {0.2, 0.6};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ExperimentSpec{};
  bad.dim = 2;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ExperimentSpec{};
  bad.split = {1.5};
  CHECK_THROWS_AS(run(bad), InvalidArgument);
}

TEST_CASE("curve CSV metadata reproduces the spec", "[harness]") {
  ExperimentSpec s;
  s.domain = {1, 2};
  s.split = {1.4};
  s.theta = 0.3;
  s.h = 1.0 / 128;
  s.dt = 1e-3;
  s.seed = 7;
  const RunResult r = run(s);
  const std::string csv = curve_csv(r);
  CHECK(spec_from_metadata(csv) == s);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("k,error\n") != std::string::npos);
  CHECK(csv.find("# info.iterations = " + std::to_string(r.report.iterations)) != std::string::npos);

  // Values carry 17 significant digits, so every error reads back exactly.
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
    const auto comma = line.find(',');
    const std::size_t k = std::stoul(line.substr(0, comma));
    REQUIRE(k < r.report.errors.size());
    CHECK(std::stod(line.substr(comma + 1)) == r.report.errors[k]);
    ++rows;
  }
  CHECK(rows == r.report.errors.size());

  const RunResult again = run(s);
  CHECK(without_wall_time(curve_csv(again)) == without_wall_time(csv));
}

TEST_CASE("bounds are written only where they apply", "[harness]") {
  ExperimentSpec dn;
  dn.dt = 1e-3;
  dn.split = {0.4};
  const RunResult a = run(dn);
  REQUIRE(a.has_bounds());
  CHECK(a.bound_alpha.size() == a.report.errors.size());
  CHECK(curve_csv(a).find("k,error,bound_alpha,bound_beta\n") != std::string::npos);
  CHECK(plot_kind(a) == PlotKind::error_and_bounds);

  dn.theta = 0.3;
  const RunResult b = run(dn);
  CHECK_FALSE(b.has_bounds());
  CHECK(plot_kind(b) == PlotKind::error);
  CHECK_THROWS_AS(plot_script("x.csv", PlotKind::error_and_bounds, false), InvalidArgument);
  CHECK(plot_script("x.csv", PlotKind::error_and_bounds, true).find("using 1:4") != std::string::npos);

  ExperimentSpec nn;
  nn.method = "nn";
  nn.domain = {0, 20};
  nn.sd = 4;
  nn.dt = 1e-6;  // complex symbols: no constants
  const RunResult c = run(nn);
  CHECK_FALSE(c.has_bounds());
  bool noted = false;
  for (const auto& [k, v] : c.info) noted = noted || v.find("not provided") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("table CSV encoding", "[harness]") {
  ExperimentSpec base;
  base.max_iter = 3;
  const TableResult empty = sweep("t", base, TableAxes{});
  const std::string e = table_csv(empty);
  CHECK(e.find("h,theta_or_sd,dt,iters\n# wall_time_s") != std::string::npos);

  TableAxes axes;
  axes.h = {1.0 / 64};
  axes.theta = {0.5, 0.1};
  axes.dt = {1e-6};
  const TableResult t = sweep("t", base, axes);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].converged);
  CHECK_FALSE(t.rows[1].converged);
  CHECK_FALSE(t.all_converged());
  const std::string csv = table_csv(t);
  CHECK(csv.find("0.015625,0.5,9.9999999999999995e-07,2\n") != std::string::npos);
  CHECK(csv.find("0.015625,0.10000000000000001,9.9999999999999995e-07,3+\n") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("monodomain diagnostics", "[harness]") {
  ExperimentSpec s;
  s.method = "monodomain";
  s.h = 1.0 / 32;
  s.dt = 1e-4;
  s.steps = 10;
  const RunResult r = run(s);
  REQUIRE(r.mass.size() == 11u);
  for (std::size_t n = 1; n < r.mass.size(); ++n) {
    CHECK(r.mass[n] == Catch::Approx(r.mass[0]).epsilon(1e-12));
    CHECK(r.energy[n] <= r.energy[n - 1] + 1e-12);
  }
  CHECK(curve_csv(r).find("step,mass,energy\n") != std::string::npos);
  CHECK(plot_kind(r) == PlotKind::diagnostics);
}

TEST_CASE("presets resolve to valid specs", "[harness]") {
  for (const auto& p : presets()) {
    CHECK_NOTHROW(p.spec.validate());
    CHECK(p.spec.preset == p.name);
    CHECK(find_preset(p.name).name == p.name);
  }
  CHECK_THROWS_AS(find_preset("nope"), InvalidArgument);
}

TEST_CASE("command line exit codes and files", "[harness]") {
  const fs::path d = scratch_dir("cli");
  const std::string out = " --out " + d.string();
  CHECK(cli("dn --h 0.015625" + out) == 0);
  const std::string csv = read_file(d / "dn.csv");
  CHECK(csv.find("k,error") != std::string::npos);
  CHECK(fs::exists(d / "dn.gp"));
  CHECK(spec_from_metadata(csv).h == 0.015625);

  CHECK(cli("dn --theta 0.1 --max-iter 3" + out) == 1);
  CHECK(cli("dn --theta 1.5" + out) == 2);
  CHECK(cli("dn --bogus 1" + out) == 2);
  CHECK(cli("dn --h abc" + out) == 2);
  CHECK(cli("fem" + out) == 2);
  CHECK(cli("--preset nope" + out) == 2);

  std::ofstream(d / "run.cfg") << "method = nn\ndomain = 0,4\nsd = 4\ntheta = 0.3\n";
  CHECK(cli("--config " + (d / "run.cfg").string() + " --theta 0.25" + out) == 0);
  const ExperimentSpec from_cfg = spec_from_metadata(read_file(d / "nn.csv"));
  CHECK(from_cfg.sd == 4);
  CHECK(*from_cfg.theta == 0.25);

  CHECK(cli("--preset table1 --h 0.015625" + out) == 0);
  CHECK(read_file(d / "table1.csv").find("h,theta_or_sd,dt,iters") != std::string::npos);
  fs::remove_all(d);
}
