#include "stmc/mass.hpp"

#include <cmath>

#include "stmc/errors.hpp"

namespace stmc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double hawking_mass(const SurfaceGeometry& geo) {
  double h2 = integrate(geo.H.square().eval(), geo);
  return std::sqrt(geo.area / (16.0 * kPi)) * (1.0 - h2 / (16.0 * kPi));
}

double gauss_bonnet_check(const SurfaceGeometry& geo) {
  // Intrinsic scalar curvature from the contracted Gauss equation.
  Field s_surf =
      geo.amb_scalar - 2.0 * geo.ric_nu - geo.Aring2 + 0.5 * geo.H.square();
  return std::abs(integrate((0.5 * s_surf).eval(), geo) - 4.0 * kPi);
}

bool well_centered_check(const ShapeReport& shape) {
  double lo = shape.r_min / shape.sigma, hi = shape.r_max / shape.sigma;
  return 2.0 / 3.0 <= lo && lo <= hi && hi <= 1.5;
}

DriftStudy drift_study(const InitialDataSet& ids, double q,
                       const std::vector<double>& sigmas, const FlowConfig& cfg,
                       const SphericalGrid& grid) {
  if (sigmas.size() < 3) throw ConfigError("drift_study: need >= 3 sigmas");
  for (size_t i = 1; i < sigmas.size(); ++i)
    if (sigmas[i] <= sigmas[i - 1])
      throw ConfigError("drift_study: sigmas must be strictly increasing");

  DriftStudy out;
  out.sigmas = sigmas;
  out.predicted_alpha = 2.0 - q / 2.0 - q * ids.delta();
  out.complete = true;

  InitialDataSet off = ids.without_extrinsic();
  for (double sg : sigmas) {
    FlowState state;
    state.surface = GraphSurface::sphere(grid, Vec3::Zero(), sg);

    // Pre-flow with the extrinsic tensor off: plain volume-preserving mean
    // curvature flow, standing in for a CMC leaf as the start surface.
    FlowConfig pre = cfg;
    pre.q = 2.0;
    FlowTrace t1 = evolve(state, off, pre);
    if (!t1.converged) {
      out.complete = false;
      break;
    }
    ShapeReport s1 = shape_report(state.surface, geometry(state.surface, off), off);
    out.z_start.push_back(s1.barycenter);

    FlowConfig main = cfg;
    main.q = q;
    state.t = 0.0;
    state.step = 0;
    FlowTrace t2 = evolve(state, ids, main);
    if (!t2.converged) {
      out.complete = false;
      out.z_start.pop_back();
      break;
    }
    ShapeReport s2 = shape_report(state.surface, geometry(state.surface, ids), ids);
    out.z_final.push_back(s2.barycenter);
    out.drift.push_back((s2.barycenter - s1.barycenter).norm());
  }

  out.vacuous = true;
  for (double d : out.drift) out.vacuous = out.vacuous && d < 1e-8;
  if (!out.vacuous && out.drift.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < out.drift.size(); ++i) {
      if (out.drift[i] <= 0.0) continue;
      double X = std::log(sigmas[i]), Y = std::log(out.drift[i]);
      sx += X;
      sy += Y;
      sxx += X * X;
      sxy += X * Y;
      ++n;
    }
    if (n >= 2) out.fitted_alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

}  // namespace stmc
