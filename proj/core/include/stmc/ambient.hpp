#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stmc/grid.hpp"

namespace stmc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class AmbientKind { euclidean, schwarzschild, schwarzschild_k, perturbed };

std::string to_string(AmbientKind k);

// Metric with analytic first and second coordinate derivatives at a point.
struct MetricJet {
  Mat3 g;
  std::array<Mat3, 3> dg;                  // dg[c](a,b) = d_c g_ab
  std::array<std::array<Mat3, 3>, 3> ddg;  // ddg[c][d](a,b), symmetric in c,d
};

// Symmetric 2-tensor (second fundamental form of the data set) with first
// derivatives.
struct ExtrinsicJet {
  Mat3 K;
  std::array<Mat3, 3> dK;  // dK[c](a,b) = d_c K_ab
};

struct CurvatureData {
  std::array<Mat3, 3> gamma;  // gamma[a](b,c) = Gamma^a_{bc}
  double riem[3][3][3][3];    // fully lowered R_{abcd}
  Mat3 ric;
  double scalar;
  Mat3 einstein;  // Ric - (S/2) g
};

// Energy and momentum density from the constraint equations.
struct ConstraintData {
  double mu;
  Vec3 j;        // momentum one-form components
  double j_mag;  // |J| in the ambient metric
};

class InitialDataSet {
 public:
  static InitialDataSet euclidean();
  static InitialDataSet schwarzschild(double m);
  // Schwarzschild metric plus K = a (1 + kappa x1/r) r^{-e} (I - 3 w w^T),
  // w the unit radial direction. Trace-free against the flat metric.
  static InitialDataSet schwarzschild_k(double m, double a, double e, double kappa = 0.0);
  // Flat metric pulled back by x -> x + amplitude * r^{-1/2-delta} M x with a
  // seeded symmetric M. Scalar-flat and vacuum by construction.
  static InitialDataSet perturbed(std::uint64_t seed, double amplitude, double delta = 0.5);

  AmbientKind kind() const { return kind_; }
  double delta() const { return delta_; }
  double r_min() const { return r_min_; }
  double mass_parameter() const { return m_; }
  double k_amplitude() const { return a_; }
  double k_decay() const { return e_; }
  bool has_extrinsic() const;

  MetricJet metric_jet(const Vec3& x) const;
  ExtrinsicJet extrinsic_jet(const Vec3& x) const;

  // Same slice with the extrinsic tensor switched off (time-symmetric run).
  InitialDataSet without_extrinsic() const;

 private:
  InitialDataSet() = default;
  AmbientKind kind_ = AmbientKind::euclidean;
  double m_ = 0.0, a_ = 0.0, e_ = 0.0, kappa_ = 0.0;
  double delta_ = 0.5, r_min_ = 0.0, amp_ = 0.0;
  bool k_on_ = false;
  Mat3 pert_m_ = Mat3::Zero();
};

CurvatureData curvature(const MetricJet& jet);

ConstraintData constraints(const InitialDataSet& ids, const Vec3& x);

struct AdmEstimate {
  double value = 0.0;    // at the requested resolution
  double refined = 0.0;  // with both grid directions doubled
  bool underresolved = false;
};

// Quasi-local ADM-type energy of the coordinate sphere |x| = radius. The
// optional rotation is applied to the quadrature directions; the result must
// not depend on it. The refinement pass doubles both grid directions.
AdmEstimate adm_energy(const InitialDataSet& ids, double radius, const SphericalGrid& grid,
                       const Mat3& rotation = Mat3::Identity());
AdmEstimate adm_energy(const InitialDataSet& ids, double radius, int n_theta = 24,
                       int n_phi = 48);

struct DecayRow {
  std::string name;
  double expected;  // power of r the quantity should not exceed
  double measured;  // least-squares slope, NaN when vacuous
  bool vacuous;     // quantity is identically ~0 for this data set
  bool ok;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  std::vector<double> radii;
  bool pass;
};

DecayReport decay_report(const InitialDataSet& ids, std::vector<double> radii = {});

}  // namespace stmc
