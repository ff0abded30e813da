#pragma once

#include "stmc/flow.hpp"
#include "stmc/surface.hpp"

namespace stmc {

// m_H = sqrt(|S|/16 pi) (1 - (1/16 pi) int H^2 dmu).
double hawking_mass(const SurfaceGeometry& geo);

// |int S^surf / 2 dmu - 4 pi| with the intrinsic scalar curvature assembled
// from the ambient curvature and the second fundamental form.
double gauss_bonnet_check(const SurfaceGeometry& geo);

bool well_centered_check(const ShapeReport& shape);

struct DriftStudy {
  std::vector<double> sigmas;
  std::vector<Vec3> z_start;   // barycenters of the pre-flow (K-off) limits
  std::vector<Vec3> z_final;   // barycenters of the converged q-flow limits
  std::vector<double> drift;   // |z_final - z_start|
  double fitted_alpha = 0.0;   // log-log slope of drift vs sigma
  double predicted_alpha = 0.0;  // 2 - q/2 - q delta
  bool vacuous = false;        // all drifts below 1e-8
  bool complete = false;       // every flow converged
};

// For each sigma: run the extrinsic-free volume-preserving flow from the
// centered coordinate sphere to get the start surface, then the full q-flow;
// fit the drift of the barycenter against sigma.
DriftStudy drift_study(const InitialDataSet& ids, double q,
                       const std::vector<double>& sigmas, const FlowConfig& cfg,
                       const SphericalGrid& grid);

}  // namespace stmc
