#include <doctest.h>

#include <stmc/config.hpp>
#include <stmc/errors.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stmc;
namespace fs = std::filesystem;

namespace {

const char* kBaseConfig = R"(# sample configuration
[experiment]
kind = run-flow

[ambient]
kind = euclidean

[grid]
n_theta = 16
n_phi = 32

[surface]
sigma = 3
perturb_l = 2
perturb_m = 0
perturb_amp = 0.05

[flow]
q = 2
stop_tol = 1e-6

[output]
dir = out
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("stmc_test_" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing honours sections, comments and defaults") {
  RunConfig cfg = parse_config(kBaseConfig);
  CHECK(cfg.experiment == ExperimentKind::run_flow);
  CHECK(cfg.ambient_kind == "euclidean");
  CHECK(cfg.n_theta == 16);
  CHECK(cfg.sigma == 3.0);
  CHECK(cfg.perturb_amp == 0.05);
  CHECK(cfg.flow.stop_tol == 1e-6);
  CHECK(cfg.flow.cfl == 0.8);  // untouched default
  CHECK(cfg.output_dir == "out");
}

TEST_CASE("overrides replace file values") {
  RunConfig cfg = parse_config(
      kBaseConfig, {"grid.n_theta=24", "flow.q=4", "surface.center_x=1.5"});
  CHECK(cfg.n_theta == 24);
  CHECK(cfg.flow.q == 4.0);
  CHECK(cfg.center[0] == 1.5);
}

TEST_CASE("all violations are reported at once") {
  try {
    parse_config(kBaseConfig, {"grid.n_theta=4", "flow.cfl=7", "bogus.key=1"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("n_theta") != std::string::npos);
    CHECK(msg.find("cfl") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  CHECK_THROWS_AS(parse_config("[grid]\nn_theta = 16\nmystery = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nkind = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nn_theta 16\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(kBaseConfig, {"no_equals_sign"}), ConfigError);
}

TEST_CASE("config echo is stable json") {
  RunConfig cfg = parse_config(kBaseConfig);
  std::string a = cfg.echo_json();
  std::string b = cfg.echo_json();
  CHECK(a == b);
  CHECK(a.find("run-flow") != std::string::npos);
}

TEST_CASE("surface factory applies shape and perturbation") {
  RunConfig cfg = parse_config(kBaseConfig, {"surface.shape=ellipsoid",
                                             "surface.axis_c=1.2",
                                             "surface.perturb_amp=0"});
  SphericalGrid g = SphericalGrid::build(cfg.n_theta, cfg.n_phi);
  GraphSurface s = cfg.make_surface(g);
  // polar radius is sigma * axis_c, equatorial radius sigma * axis_a
  double rho_pole = s.rho[g.index(0, 0)];
  CHECK(std::abs(rho_pole - 3.0 * 1.2) < 0.05);  // first node is near the pole
  CHECK(s.rho.minCoeff() > 2.99);
}

TEST_CASE("a run is reproducible byte for byte") {
  fs::path d1 = temp_dir("rerun_a"), d2 = temp_dir("rerun_b");
  RunConfig c1 = parse_config(kBaseConfig, {"output.dir=" + d1.string()});
  RunConfig c2 = parse_config(kBaseConfig, {"output.dir=" + d2.string()});
  CHECK(execute(c1) == 0);
  CHECK(execute(c2) == 0);
  CHECK(slurp(d1 / "trace.csv") == slurp(d2 / "trace.csv"));
  CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
  CHECK(slurp(d1 / "snapshots" / "final.json") == slurp(d2 / "snapshots" / "final.json"));
  CHECK(!slurp(d1 / "trace.csv").empty());
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("trace header is frozen") {
  fs::path d = temp_dir("header");
  RunConfig cfg = parse_config(kBaseConfig, {"output.dir=" + d.string()});
  CHECK(execute(cfg) == 0);
  std::string text = slurp(d / "trace.csv");
  std::string header = text.substr(0, text.find('\n'));
  CHECK(header ==
        "t,hbar,dev_l2,dev_inf,gradHq_l4,volume,area,sigma,z_x,z_y,z_z,"
        "limit_residual,in_class,b_traceless,b_area,b_ratio,b_afunc,b_maxA,"
        "b_kappa_floor,aL4,a_func,maxA,min_kappa,oscH,h1");
  fs::remove_all(d);
}

TEST_CASE("non-convergence maps to exit code 4") {
  fs::path d = temp_dir("budget");
  RunConfig cfg = parse_config(
      kBaseConfig, {"output.dir=" + d.string(), "flow.max_steps=2"});
  CHECK(execute(cfg) == 4);
  CHECK(fs::exists(d / "FAILED"));
  fs::remove_all(d);
}

TEST_CASE("identity suite runs end to end") {
  fs::path d = temp_dir("identity");
  RunConfig cfg = parse_config(kBaseConfig,
                               {"output.dir=" + d.string(),
                                "experiment.kind=identity-suite",
                                "ambient.kind=schwarzschild", "ambient.m=1",
                                "surface.sigma=8", "surface.perturb_amp=0",
                                "grid.n_theta=24", "grid.n_phi=48"});
  CHECK(execute(cfg) == 0);
  CHECK(fs::exists(d / "identity.json"));
  CHECK(fs::exists(d / "manifest.json"));
  fs::remove_all(d);
}
