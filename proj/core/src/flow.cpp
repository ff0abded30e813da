#include "stmc/flow.hpp"

#include <algorithm>
#include <cmath>

#include "stmc/errors.hpp"

namespace stmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct StageEval {
  SurfaceGeometry geo;
  STCurvature st;
  Field drho;  // (hbar - Hq) / g(omega, nu)
};

StageEval eval_rhs(const SphericalGrid& grid, const Vec3& center, const Field& rho,
                   const InitialDataSet& ids, double q) {
  if (!rho.isFinite().all()) throw NumericError("flow: non-finite radial field");
  GraphSurface s;
  s.center = center;
  s.grid = grid;
  s.rho = rho;
  StageEval ev{geometry(s, ids), {}, {}};
  ev.st = st_curvature(ev.geo, trace_K(ev.geo, ids), q);
  ev.drho = (ev.st.hbar - ev.st.Hq) / ev.geo.nu_omega;
  return ev;
}

Field rk4_advance(const SphericalGrid& grid, const Vec3& center, const Field& rho,
                  const InitialDataSet& ids, double q, double dt) {
  Field k1 = eval_rhs(grid, center, rho, ids, q).drho;
  Field k2 = eval_rhs(grid, center, (rho + 0.5 * dt * k1).eval(), ids, q).drho;
  Field k3 = eval_rhs(grid, center, (rho + 0.5 * dt * k2).eval(), ids, q).drho;
  Field k4 = eval_rhs(grid, center, (rho + dt * k3).eval(), ids, q).drho;
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Re-anchor the graph to a new center: for every node direction of the grid,
// find the distance at which the ray from the new center crosses the old
// graph. Newton iteration with bisection fallback on the old harmonic series.
GraphSurface reanchor(const GraphSurface& s, const Vec3& znew) {
  ShCoeffs c = s.grid.analyze(s.rho);
  const auto& g = s.grid;
  GraphSurface out;
  out.center = znew;
  out.grid = g;
  out.rho.resize(g.size());
  double t0 = s.rho.mean();
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      int k = g.index(i, j);
      double st = g.sin_theta()[k], ct = g.cos_theta()[k];
      Vec3 w(st * std::cos(g.phi(j)), st * std::sin(g.phi(j)), ct);
      auto miss = [&](double t) {
        Vec3 p = znew + t * w - s.center;
        double r = p.norm();
        double th = std::acos(std::min(1.0, std::max(-1.0, p[2] / r)));
        double ph = std::atan2(p[1], p[0]);
        return r - sh_eval(c, th, ph);
      };
      double t = t0, f = miss(t);
      bool done = false;
      for (int it = 0; it < 60 && !done; ++it) {
        double h = 1e-6 * t0;
        double fp = (miss(t + h) - f) / h;
        double tn = (std::abs(fp) > 1e-14) ? t - f / fp : t - f;
        if (tn <= 0.0) tn = 0.5 * t;
        double fn = miss(tn);
        if (std::abs(fn) < 1e-13 * t0) done = true;
        t = tn;
        f = fn;
      }
      if (!done && std::abs(f) > 1e-9 * t0)
        throw GraphBreakdownError("recentering failed to solve for the new graph");
      out.rho[k] = t;
    }
  return out;
}

TraceRow make_row(const FlowState& state, const StageEval& ev, const InitialDataSet& ids,
                  const FlowConfig& cfg) {
  TraceRow row;
  row.t = state.t;
  row.hbar = ev.st.hbar;
  Field dev = ev.st.Hq - ev.st.hbar;
  row.dev_l2 = lp_norm(dev, ev.geo, 2.0);
  row.dev_inf = dev.abs().maxCoeff();
  Field gradHq = grad_norm2(ev.st.Hq, ev.geo).max(0.0).sqrt();
  row.gradHq_l4 = lp_norm(gradHq, ev.geo, 4.0);
  ShapeReport shape = shape_report(state.surface, ev.geo, ids);
  row.volume = shape.volume;
  row.area = shape.area;
  row.sigma = shape.sigma;
  row.barycenter = shape.barycenter;
  RoundnessParams rp;
  rp.sigma = shape.sigma;
  rp.delta = ids.delta();
  row.roundness = roundness_report(state.surface, ev.geo, ev.st, rp, ids);
  double q = cfg.q;
  Field res = ev.geo.H.pow(q) - ev.st.P.abs().pow(q) - std::pow(ev.st.hbar, q);
  row.limit_res = res.abs().maxCoeff() / std::pow(ev.st.hbar, q);
  return row;
}

}  // namespace

Field speed_field(const FlowState& state, const InitialDataSet& ids, double q) {
  StageEval ev = eval_rhs(state.surface.grid, state.surface.center, state.surface.rho,
                          ids, q);
  return ev.st.Hq - ev.st.hbar;
}

double suggest_dt(const SurfaceGeometry& geo, const STCurvature& st, double cfl) {
  double sigma = std::sqrt(geo.area / (4.0 * kPi));
  double h = kPi * sigma / geo.grid.n_theta();
  double proxy = st.phi_prime.maxCoeff() * geo.A2.sqrt().maxCoeff() * sigma /
                 std::sqrt(2.0);
  proxy = std::max(proxy, 1e-10);
  return cfl * 0.28 * h * h / proxy;
}

FlowState step(const FlowState& state, const InitialDataSet& ids, const FlowConfig& cfg,
               double dt) {
  if (dt <= 0.0) throw ConfigError("step: dt must be positive");
  FlowState out = state;
  out.surface.rho = rk4_advance(state.surface.grid, state.surface.center,
                                state.surface.rho, ids, cfg.q, dt);
  out.t += dt;
  out.step += 1;
  return out;
}

FlowTrace evolve(FlowState& state, const InitialDataSet& ids, const FlowConfig& cfg,
                 const ReportHook& on_report) {
  if (cfg.q < 2.0 || cfg.cfl <= 0.0 || cfg.cfl > 1.0 || cfg.stop_tol <= 0.0)
    throw ConfigError("evolve: invalid flow configuration");
  FlowTrace trace;
  int rejections_at_min = 0;
  long last_report = -1;

  while (true) {
    StageEval ev = eval_rhs(state.surface.grid, state.surface.center, state.surface.rho,
                            ids, cfg.q);
    double residual = (ev.st.Hq - ev.st.hbar).abs().maxCoeff() / ev.st.hbar;

    bool report = state.step % cfg.report_every == 0;
    bool stop = residual < cfg.stop_tol || state.t >= cfg.t_max ||
                state.step >= cfg.max_steps;
    if (report || stop) {
      if (state.step != last_report) {
        trace.rows.push_back(make_row(state, ev, ids, cfg));
        last_report = state.step;
        if (on_report) on_report(state, trace.rows.back());
      }
    }
    trace.final_residual = residual;
    if (residual < cfg.stop_tol) {
      trace.converged = true;
      break;
    }
    if (state.t >= cfg.t_max || state.step >= cfg.max_steps) break;

    if (cfg.recentering && ev.geo.nu_omega.minCoeff() < 0.3) {
      ShapeReport shape = shape_report(state.surface, ev.geo, ids);
      state.surface = reanchor(state.surface, shape.barycenter);
      continue;
    }

    double dt_full = suggest_dt(ev.geo, ev.st, cfg.cfl);
    double dt = dt_full;
    const double dt_min = dt_full / 1024.0;
    bool accepted = false;
    while (!accepted) {
      try {
        state = step(state, ids, cfg, dt);
        accepted = true;
      } catch (const GraphBreakdownError&) {
        if (dt <= dt_min) {
          if (++rejections_at_min >= 2) {
            trace.aborted = true;
            trace.abort_reason = "step rejected twice at minimum dt";
            trace.t_final = state.t;
            trace.steps = state.step;
            return trace;
          }
          // try a recentering pass before the next minimum-dt attempt
          ShapeReport shape = shape_report(state.surface, ev.geo, ids);
          state.surface = reanchor(state.surface, shape.barycenter);
          break;
        }
        dt *= 0.5;
      }
    }
  }
  trace.t_final = state.t;
  trace.steps = state.step;
  return trace;
}

namespace {

using XFields = std::array<Field, 3>;

// Right-hand side of the unreparametrized normal flow dX/dt = -f nu.
XFields normal_rhs(const SphericalGrid& grid, const XFields& X, const InitialDataSet& ids,
                   double q, const Vec3& center) {
  SurfaceGeometry geo = immersion_geometry(grid, X, ids, center);
  STCurvature st = st_curvature(geo, trace_K(geo, ids), q);
  Field f = st.Hq - st.hbar;
  XFields out;
  for (int c = 0; c < 3; ++c) {
    out[c].resize(grid.size());
    for (int k = 0; k < grid.size(); ++k) out[c][k] = -f[k] * geo.nu[k][c];
  }
  return out;
}

XFields rk4_normal(const SphericalGrid& grid, const XFields& X, const InitialDataSet& ids,
                   double q, const Vec3& center, double dt) {
  auto lin = [&](const XFields& a, const XFields& b, double s) {
    XFields r;
    for (int c = 0; c < 3; ++c) r[c] = a[c] + s * b[c];
    return r;
  };
  XFields k1 = normal_rhs(grid, X, ids, q, center);
  XFields k2 = normal_rhs(grid, lin(X, k1, 0.5 * dt), ids, q, center);
  XFields k3 = normal_rhs(grid, lin(X, k2, 0.5 * dt), ids, q, center);
  XFields k4 = normal_rhs(grid, lin(X, k3, dt), ids, q, center);
  XFields out;
  for (int c = 0; c < 3; ++c)
    out[c] = X[c] + (dt / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  return out;
}

double rel_max(const Field& num, const Field& den) {
  double scale = den.abs().maxCoeff();
  if (scale < 1e-14) return num.abs().maxCoeff();
  return num.abs().maxCoeff() / scale;
}

}  // namespace

IdentityReport evolution_identity_check(const FlowState& state, const InitialDataSet& ids,
                                        const FlowConfig& cfg, double dt) {
  const auto& grid = state.surface.grid;
  const Vec3 center = state.surface.center;

  XFields X0;
  for (auto& f : X0) f.resize(grid.size());
  for (int i = 0; i < grid.n_theta(); ++i)
    for (int j = 0; j < grid.n_phi(); ++j) {
      int k = grid.index(i, j);
      double st = grid.sin_theta()[k], ct = grid.cos_theta()[k];
      Vec3 w(st * std::cos(grid.phi(j)), st * std::sin(grid.phi(j)), ct);
      Vec3 p = center + state.surface.rho[k] * w;
      for (int c = 0; c < 3; ++c) X0[c][k] = p[c];
    }

  SurfaceGeometry geo0 = immersion_geometry(grid, X0, ids, center);
  STCurvature st0 = st_curvature(geo0, trace_K(geo0, ids), cfg.q);
  Field f = st0.Hq - st0.hbar;

  XFields Xp = rk4_normal(grid, X0, ids, cfg.q, center, dt);
  XFields Xm = rk4_normal(grid, X0, ids, cfg.q, center, -dt);
  SurfaceGeometry geop = immersion_geometry(grid, Xp, ids, center);
  SurfaceGeometry geom = immersion_geometry(grid, Xm, ids, center);

  IdentityReport rep;
  // d g_ij / dt = -2 f h_ij
  {
    double worst = 0.0;
    const Field* gp[3] = {&geop.g11, &geop.g12, &geop.g22};
    const Field* gm[3] = {&geom.g11, &geom.g12, &geom.g22};
    const Field* h0[3] = {&geo0.h11, &geo0.h12, &geo0.h22};
    for (int c = 0; c < 3; ++c) {
      Field lhs = (*gp[c] - *gm[c]) / (2.0 * dt);
      Field rhs = -2.0 * f * (*h0[c]);
      worst = std::max(worst, rel_max((lhs - rhs).eval(), rhs));
    }
    rep.res_metric = worst;
  }
  // d(dmu)/dt = -f H dmu (quadrature weights cancel)
  {
    Field lhs = (geop.dmu - geom.dmu) / (2.0 * dt);
    Field rhs = -f * geo0.H * geo0.dmu;
    rep.res_measure = rel_max((lhs - rhs).eval(), rhs);
  }
  // dH/dt = Lap f + f (|A|^2 + Ric(nu, nu))
  {
    Field lhs = (geop.H - geom.H) / (2.0 * dt);
    Field rhs = surface_laplacian(f, geo0) + f * (geo0.A2 + geo0.ric_nu);
    rep.res_meancurv = rel_max((lhs - rhs).eval(), rhs);
  }
  return rep;
}

double limit_residual(const GraphSurface& s, const InitialDataSet& ids, double q) {
  SurfaceGeometry geo = geometry(s, ids);
  STCurvature st = st_curvature(geo, trace_K(geo, ids), q);
  Field res = geo.H.pow(q) - st.P.abs().pow(q) - std::pow(st.hbar, q);
  return res.abs().maxCoeff() / std::pow(st.hbar, q);
}

DecayFit decay_fit(const FlowTrace& trace, const InitialDataSet& ids, double sigma) {
  std::vector<double> t, y;
  for (const auto& row : trace.rows)
    if (row.dev_l2 > 0.0) {
      t.push_back(row.t);
      y.push_back(std::log(row.dev_l2));
    }
  if (t.size() < 10) throw InsufficientDataError("decay_fit: fewer than 10 usable rows");
  double ymax = *std::max_element(y.begin(), y.end());
  double ymin = *std::min_element(y.begin(), y.end());
  if (ymax - ymin < 2.0 * std::log(10.0))
    throw InsufficientDataError("decay_fit: norm spans fewer than 2 decades");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = t.size();
  for (int i = 0; i < n; ++i) {
    sx += t[i];
    sy += y[i];
    sxx += t[i] * t[i];
    sxy += t[i] * y[i];
    syy += y[i] * y[i];
  }
  DecayFit fit;
  double denom = n * sxx - sx * sx;
  fit.rate = (n * sxy - sx * sy) / denom;
  double corr_num = n * sxy - sx * sy;
  double corr_den = std::sqrt(denom * (n * syy - sy * sy));
  fit.r2 = corr_den > 0 ? (corr_num / corr_den) * (corr_num / corr_den) : 0.0;

  fit.energy = (ids.kind() == AmbientKind::euclidean)
                   ? 0.0
                   : adm_energy(ids, 400.0).refined;
  double s3 = sigma * sigma * sigma;
  fit.bound = fit.energy / (3.0 * s3);
  fit.bound_l2 = fit.energy / (6.0 * s3);
  fit.bound_strong = fit.energy / s3;
  fit.bound_l2_strong = fit.energy / (2.0 * s3);
  return fit;
}

}  // namespace stmc
