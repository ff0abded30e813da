#pragma once

#include "stmc/surface.hpp"

namespace stmc {

// Generalized (Lorentz-type) mean curvature Hq = (H^q - |P|^q)^{1/q} with
// P the ambient extrinsic tensor traced over the surface, plus the null
// expansions and the flow's integral mean.
struct STCurvature {
  double q = 2.0;
  double hbar = 0.0;  // integral mean of Hq, same quadrature as the surface
  Field P, Hq, phi_prime, theta_plus, theta_minus;
};

Field trace_K(const SurfaceGeometry& geo, const InitialDataSet& ids);

// Throws AdmissibilityError naming the worst node when H^q <= |P|^q anywhere.
STCurvature st_curvature(const SurfaceGeometry& geo, const Field& P, double q);

struct ChartVec {
  Field dth, dph;
};

struct PhiCalculus {
  Field phi_prime;
  ChartVec grad_H, grad_Hq;
  // max over nodes of |Hq^{q-1} grad Hq - H^{q-1} grad H + |P|^{q-2} P grad P|
  double identity_residual = 0.0;
};

PhiCalculus phi_calculus(const SurfaceGeometry& geo, const STCurvature& st);

// Symmetric 2x2 tensor making Hess(Hq) = Hess(H) + T an identity; assembled
// from beta(s) = (1 - s^q)^{1/q} - 1, s = |P|/H.
struct ReminderTensor {
  Field t11, t12, t22;
};

ReminderTensor reminder_tensor(const SurfaceGeometry& geo, const STCurvature& st);

struct RoundnessParams {
  double sigma = 1.0;
  double eta = 1.0;
  double b1 = 10.0;
  double b2 = 10.0;
  double delta = 0.5;
};

struct RoundnessReport {
  RoundnessParams params;
  double aL4 = 0.0;      // ||traceless A||_L4
  double area = 0.0;
  double ratio_r = 0.0;  // r_min / sigma_area
  double ratio_R = 0.0;  // r_max / sigma_area
  double a_func = 0.0;   // eta sigma^-4 ||Hq-hbar||_4^4 + ||grad Hq||_4^4
  double maxA = 0.0;     // max |A|
  double min_kappa = 0.0;
  double oscH = 0.0;     // max H - min H
  double h1 = 0.0;       // ||Hq - hbar||_{H^1}
  bool b_traceless = false, b_area = false, b_ratio = false, b_afunc = false,
       b_maxA = false, b_kappa_floor = false;
  bool in_class = false;  // conjunction of the first five flags
};

RoundnessReport roundness_report(const GraphSurface& s, const SurfaceGeometry& geo,
                                 const STCurvature& st, const RoundnessParams& params,
                                 const InitialDataSet& ids);

// Oscillation-vs-traceless-part diagnostic: ||H - mean H||_4 against ||Aring||_4.
struct PerezDiagnostic {
  double lhs = 0.0;
  double aring_l4 = 0.0;
  double ratio = 0.0;
  bool applicable = false;  // false when the denominator vanishes
};

PerezDiagnostic perez_diagnostic(const SurfaceGeometry& geo);

}  // namespace stmc
