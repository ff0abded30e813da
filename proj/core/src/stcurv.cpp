#include "stmc/stcurv.hpp"

#include <cmath>
#include <limits>

#include "stmc/errors.hpp"

namespace stmc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Field trace_K(const SurfaceGeometry& geo, const InitialDataSet& ids) {
  const int n = geo.grid.size();
  Field P = Field::Zero(n);
  if (!ids.has_extrinsic()) return P;
  for (int k = 0; k < n; ++k) {
    Mat3 K = ids.extrinsic_jet(geo.pos[k]).K;
    double k11 = geo.t1[k].dot(K * geo.t1[k]);
    double k12 = geo.t1[k].dot(K * geo.t2[k]);
    double k22 = geo.t2[k].dot(K * geo.t2[k]);
    P[k] = geo.gi11[k] * k11 + 2.0 * geo.gi12[k] * k12 + geo.gi22[k] * k22;
  }
  return P;
}

STCurvature st_curvature(const SurfaceGeometry& geo, const Field& P, double q) {
  if (q < 2.0) throw ConfigError("st_curvature: q >= 2 required");
  const int n = geo.grid.size();
  STCurvature st;
  st.q = q;
  st.P = P;
  st.Hq.resize(n);
  st.phi_prime.resize(n);
  st.theta_plus = geo.H + P;
  st.theta_minus = geo.H - P;
  for (int k = 0; k < n; ++k) {
    double H = geo.H[k];
    double hq = std::pow(H, q) - std::pow(std::abs(P[k]), q);
    if (!(H > 0.0) || !(hq > 0.0)) {
      const Vec3& x = geo.pos[k];
      throw AdmissibilityError(
          "H^q <= |P|^q at node " + std::to_string(k) + " (x = " + std::to_string(x[0]) +
          ", " + std::to_string(x[1]) + ", " + std::to_string(x[2]) +
          "; H = " + std::to_string(H) + ", P = " + std::to_string(P[k]) + ")");
    }
    st.Hq[k] = std::pow(hq, 1.0 / q);
    st.phi_prime[k] = std::pow(H / st.Hq[k], q - 1.0);
  }
  st.hbar = integral_mean(st.Hq, geo);
  return st;
}

PhiCalculus phi_calculus(const SurfaceGeometry& geo, const STCurvature& st) {
  PhiCalculus out;
  out.phi_prime = st.phi_prime;
  FieldJet jh = geo.grid.jet(geo.H);
  FieldJet jq = geo.grid.jet(st.Hq);
  FieldJet jp = geo.grid.jet(st.P);
  out.grad_H = {jh.dth, jh.dph};
  out.grad_Hq = {jq.dth, jq.dph};

  const double q = st.q;
  Field cH = geo.H.pow(q - 1.0);
  Field cQ = st.Hq.pow(q - 1.0);
  Field cP = st.P.abs().pow(q - 2.0) * st.P;
  Field v1 = cQ * jq.dth - cH * jh.dth + cP * jp.dth;
  Field v2 = cQ * jq.dph - cH * jh.dph + cP * jp.dph;
  Field norm2 = geo.gi11 * v1 * v1 + 2.0 * geo.gi12 * v1 * v2 + geo.gi22 * v2 * v2;
  out.identity_residual = std::sqrt(norm2.maxCoeff());
  return out;
}

ReminderTensor reminder_tensor(const SurfaceGeometry& geo, const STCurvature& st) {
  const double q = st.q;
  Field s = st.P.abs() / geo.H;
  if ((s >= 1.0).any()) throw AdmissibilityError("reminder_tensor: |P|/H >= 1");

  Field sq = s.pow(q);
  Field one = 1.0 - sq;
  Field beta = one.pow(1.0 / q) - 1.0;
  Field beta1 = -s.pow(q - 1.0) * one.pow(1.0 / q - 1.0);
  Field beta2 = -(q - 1.0) * (s.pow(q - 2.0) * one.pow(1.0 / q - 1.0) +
                              s.pow(2.0 * q - 2.0) * one.pow(1.0 / q - 2.0));

  FieldJet jh = geo.grid.jet(geo.H);
  FieldJet js = geo.grid.jet(s);
  HessField hh = surface_hessian(geo.H, geo);
  HessField hs = surface_hessian(s, geo);

  ReminderTensor T;
  Field hb = geo.H * beta1;
  T.t11 = hh.h11 * beta + beta1 * (jh.dth * js.dth + jh.dth * js.dth) +
          geo.H * beta2 * js.dth * js.dth + hb * hs.h11;
  T.t12 = hh.h12 * beta + beta1 * (jh.dth * js.dph + jh.dph * js.dth) +
          geo.H * beta2 * js.dth * js.dph + hb * hs.h12;
  T.t22 = hh.h22 * beta + beta1 * (jh.dph * js.dph + jh.dph * js.dph) +
          geo.H * beta2 * js.dph * js.dph + hb * hs.h22;
  return T;
}

RoundnessReport roundness_report(const GraphSurface& s, const SurfaceGeometry& geo,
                                 const STCurvature& st, const RoundnessParams& params,
                                 const InitialDataSet& ids) {
  RoundnessReport rep;
  rep.params = params;
  const double sg = params.sigma, dl = params.delta;

  ShapeReport shape = shape_report(s, geo, ids);
  Field aring = geo.Aring2.sqrt();
  Field dev = st.Hq - st.hbar;
  Field gradHq = grad_norm2(st.Hq, geo).max(0.0).sqrt();

  rep.aL4 = lp_norm(aring, geo, 4.0);
  rep.area = geo.area;
  rep.ratio_r = shape.r_min / shape.sigma;
  rep.ratio_R = shape.r_max / shape.sigma;
  double dev4 = std::pow(lp_norm(dev, geo, 4.0), 4.0);
  double grad4 = std::pow(lp_norm(gradHq, geo, 4.0), 4.0);
  rep.a_func = params.eta * std::pow(sg, -4.0) * dev4 + grad4;
  rep.maxA = geo.A2.sqrt().maxCoeff();
  rep.min_kappa = std::min(geo.kap1.minCoeff(), geo.kap2.minCoeff());
  rep.oscH = geo.H.maxCoeff() - geo.H.minCoeff();
  double dev2 = lp_norm(dev, geo, 2.0);
  double gdev2 = lp_norm(gradHq, geo, 2.0);  // grad hbar = 0
  rep.h1 = std::sqrt(dev2 * dev2 + gdev2 * gdev2);

  rep.b_traceless = rep.aL4 < params.b1 * std::pow(sg, -1.0 - dl);
  rep.b_area = 3.5 * kPi * sg * sg < rep.area && rep.area < 5.0 * kPi * sg * sg;
  rep.b_ratio = (2.0 / 3.0 < rep.ratio_r) && (rep.ratio_r <= rep.ratio_R) &&
                (rep.ratio_R < 1.5);
  rep.b_afunc = rep.a_func < params.b2 * std::pow(sg, -8.0 - 4.0 * dl);
  rep.b_maxA = rep.maxA < std::sqrt(5.0 / (2.0 * sg * sg));
  rep.b_kappa_floor = rep.min_kappa >= 1.0 / (2.0 * sg);
  rep.in_class =
      rep.b_traceless && rep.b_area && rep.b_ratio && rep.b_afunc && rep.b_maxA;
  return rep;
}

PerezDiagnostic perez_diagnostic(const SurfaceGeometry& geo) {
  PerezDiagnostic out;
  double h = integral_mean(geo.H, geo);
  Field dev = geo.H - h;
  out.lhs = lp_norm(dev, geo, 4.0);
  out.aring_l4 = lp_norm(geo.Aring2.sqrt().eval(), geo, 4.0);
  out.applicable = out.aring_l4 > 1e-14;
  out.ratio = out.applicable ? out.lhs / out.aring_l4
                             : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace stmc
