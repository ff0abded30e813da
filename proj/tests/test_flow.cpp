#include <doctest.h>

#include <stmc/errors.hpp>
#include <stmc/flow.hpp>

#include <cmath>

using namespace stmc;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("round spheres are stationary") {
  SphericalGrid g = SphericalGrid::build(24, 48);
  {
    FlowState st{GraphSurface::sphere(g, Vec3::Zero(), 5.0), 0.0, 0};
    Field f = speed_field(st, InitialDataSet::euclidean(), 2.0);
    CHECK(f.abs().maxCoeff() < 1e-9);
  }
  {
    FlowState st{GraphSurface::sphere(g, Vec3::Zero(), 10.0), 0.0, 0};
    Field f = speed_field(st, InitialDataSet::schwarzschild(1.0), 2.0);
    CHECK(f.abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("step size suggestion scales with the cfl number") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  SurfaceGeometry geo = geometry(GraphSurface::sphere(g, Vec3::Zero(), 4.0), ids);
  STCurvature st = st_curvature(geo, trace_K(geo, ids), 2.0);
  double d1 = suggest_dt(geo, st, 0.8);
  double d2 = suggest_dt(geo, st, 0.4);
  CHECK(d1 > 0.0);
  CHECK(std::abs(d1 / d2 - 2.0) < 1e-12);
}

TEST_CASE("time stepper is fourth order in dt") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  Field y22 = real_harmonic(g, 2, 2);
  Field rho = Field::Constant(g.size(), 4.0) * (1.0 + 0.08 * y22 / y22.abs().maxCoeff());
  GraphSurface s{Vec3::Zero(), rho.eval(), g};
  FlowConfig cfg;
  cfg.recentering = false;

  double dt = 0.2;
  FlowState s0{s, 0.0, 0};
  FlowState coarse = step(s0, ids, cfg, dt);
  FlowState mid = step(step(s0, ids, cfg, dt / 2), ids, cfg, dt / 2);
  FlowState fine = s0;
  for (int i = 0; i < 8; ++i) fine = step(fine, ids, cfg, dt / 8);

  double e1 = (coarse.surface.rho - fine.surface.rho).abs().maxCoeff();
  double e2 = (mid.surface.rho - fine.surface.rho).abs().maxCoeff();
  CHECK(e1 / e2 > 10.0);  // 16-32 depending on cancellation in the halved run
  CHECK(e1 / e2 < 40.0);
}

TEST_CASE("ellipsoid flows to a round sphere with conserved volume") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  Field rho(g.size());
  double sg = 4.0, c = 1.2;
  for (int k = 0; k < g.size(); ++k) {
    double ct = g.cos_theta()[k], st2 = 1.0 - ct * ct;
    rho[k] = sg / std::sqrt(st2 + ct * ct / (c * c));
  }
  FlowState state{GraphSurface{Vec3::Zero(), rho, g}, 0.0, 0};
  FlowConfig cfg;
  cfg.stop_tol = 1e-8;
  ShapeReport before = shape_report(state.surface, geometry(state.surface, ids), ids);

  FlowTrace trace = evolve(state, ids, cfg);
  CHECK(trace.converged);
  CHECK_FALSE(trace.aborted);
  CHECK(trace.final_residual < 1e-8);

  SurfaceGeometry geo = geometry(state.surface, ids);
  ShapeReport after = shape_report(state.surface, geo, ids);
  CHECK(std::abs(after.volume - before.volume) < 1e-6 * before.volume);
  CHECK(geo.Aring2.sqrt().maxCoeff() < 1e-6);
  CHECK((geo.H.maxCoeff() - geo.H.minCoeff()) / geo.H.mean() < 1e-6);
  CHECK(limit_residual(state.surface, ids, 2.0) < 1e-7);
}

TEST_CASE("trace rows carry a monotone clock and the frozen diagnostics") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  Field y = real_harmonic(g, 2, 0);
  Field rho = Field::Constant(g.size(), 3.0) * (1.0 + 0.05 * y / y.abs().maxCoeff());
  FlowState state{GraphSurface{Vec3::Zero(), rho.eval(), g}, 0.0, 0};
  FlowConfig cfg;
  cfg.report_every = 5;
  int hook_calls = 0;
  FlowTrace trace = evolve(state, ids, cfg,
                           [&](const FlowState&, const TraceRow&) { ++hook_calls; });
  CHECK(trace.converged);
  CHECK(hook_calls == (int)trace.rows.size());
  REQUIRE(trace.rows.size() >= 3);
  for (size_t i = 1; i < trace.rows.size(); ++i) {
    CHECK(trace.rows[i].t > trace.rows[i - 1].t);
    CHECK(trace.rows[i].volume == doctest::Approx(trace.rows[0].volume).epsilon(1e-9));
  }
  // deviation decays overall
  CHECK(trace.rows.back().dev_l2 < 1e-4 * trace.rows.front().dev_l2);
  // sigma is the area radius
  const TraceRow& r0 = trace.rows.front();
  CHECK(std::abs(r0.sigma - std::sqrt(r0.area / (4.0 * kPi))) < 1e-12);
}

TEST_CASE("an off-center start converges and keeps the graph anchored") {
  InitialDataSet ids = InitialDataSet::schwarzschild(1.0);
  SphericalGrid g = SphericalGrid::build(16, 32);
  FlowState state{GraphSurface::sphere(g, Vec3(1.0, 0.0, 0.0), 10.0), 0.0, 0};
  FlowConfig cfg;
  cfg.stop_tol = 1e-6;
  FlowTrace trace = evolve(state, ids, cfg);
  CHECK(trace.converged);
  SurfaceGeometry geo = geometry(state.surface, ids);
  ShapeReport rep = shape_report(state.surface, geo, ids);
  // the limit is the centered sphere of the same volume
  CHECK(rep.barycenter.norm() < 0.05);
  CHECK(geo.nu_omega.minCoeff() > 0.9);
}

TEST_CASE("step budget exhaustion reports non-convergence") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  Field y = real_harmonic(g, 2, 0);
  Field rho = Field::Constant(g.size(), 3.0) * (1.0 + 0.05 * y / y.abs().maxCoeff());
  FlowState state{GraphSurface{Vec3::Zero(), rho.eval(), g}, 0.0, 0};
  FlowConfig cfg;
  cfg.max_steps = 3;
  FlowTrace trace = evolve(state, ids, cfg);
  CHECK_FALSE(trace.converged);
  CHECK(trace.steps == 3);
}

TEST_CASE("evolution identities converge at second order in dt") {
  InitialDataSet ids = InitialDataSet::schwarzschild(2.0);
  SphericalGrid g = SphericalGrid::build(24, 48);
  Field y22 = real_harmonic(g, 2, 2), y31 = real_harmonic(g, 3, 1);
  Field rho = Field::Constant(g.size(), 10.0) *
              (1.0 + 0.05 * y22 / y22.abs().maxCoeff() + 0.03 * y31 / y31.abs().maxCoeff());
  FlowState state{GraphSurface{Vec3::Zero(), rho.eval(), g}, 0.0, 0};
  FlowConfig cfg;
  IdentityReport r1 = evolution_identity_check(state, ids, cfg, 4e-2);
  IdentityReport r2 = evolution_identity_check(state, ids, cfg, 2e-2);
  CHECK(r1.res_metric / r2.res_metric == doctest::Approx(4.0).epsilon(0.125));
  CHECK(r1.res_measure / r2.res_measure == doctest::Approx(4.0).epsilon(0.125));
  CHECK(r1.res_meancurv / r2.res_meancurv == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("decay fit demands enough usable data") {
  FlowTrace empty;
  CHECK_THROWS_AS(decay_fit(empty, InitialDataSet::euclidean(), 4.0),
                  InsufficientDataError);
  FlowTrace flat;
  for (int i = 0; i < 20; ++i) {
    TraceRow row;
    row.t = i;
    row.dev_l2 = 1.0 + 1e-4 * i;  // spans far less than two decades
    flat.rows.push_back(row);
  }
  CHECK_THROWS_AS(decay_fit(flat, InitialDataSet::euclidean(), 4.0),
                  InsufficientDataError);
}

TEST_CASE("decay fit recovers a synthetic exponential") {
  FlowTrace t;
  for (int i = 0; i < 40; ++i) {
    TraceRow row;
    row.t = 2.0 * i;
    row.dev_l2 = 3.0 * std::exp(-0.11 * row.t);
    t.rows.push_back(row);
  }
  DecayFit fit = decay_fit(t, InitialDataSet::euclidean(), 4.0);
  CHECK(std::abs(fit.rate + 0.11) < 1e-10);
  CHECK(fit.r2 > 0.999999);
  CHECK(fit.energy == 0.0);  // flat background carries no energy
}
