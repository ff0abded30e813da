#pragma once

#include "stmc/surface.hpp"

namespace stmc {

// Eigenpairs of -Laplace-Beltrami on the surface, mass-orthonormal in the
// quadrature inner product, ascending by eigenvalue. Sign convention: the
// largest-magnitude basis coefficient of each eigenfield is positive.
struct EigenSystem {
  std::vector<double> lambda;
  std::vector<Field> fields;
  double ortho_residual = 0.0;  // max |<f_i, f_j> - delta_ij|
  int basis_degree = 0;
};

// Galerkin discretization in the real harmonic basis; dense generalized
// symmetric eigensolve. k <= grid size / 4.
EigenSystem laplace_eigs(const SurfaceGeometry& geo, int k);

// L w = Lap w + (|A|^2 + Ric(nu, nu)) w.
Field stability_apply(const SurfaceGeometry& geo, const Field& w);

struct SplitField {
  Field w0;  // constant mean part
  Field wt;  // projection onto eigenfields 1..3
  Field wd;  // remainder, w = w0 + wt + wd
  bool degenerate_warning = false;  // lambda_3 ~ lambda_4 within 1e-10
};

SplitField translational_split(const Field& w, const EigenSystem& eigs,
                               const SurfaceGeometry& geo);

struct StabilityForm {
  double value = 0.0;   // integral of (L w) w dmu, mean removed first
  double bound = 0.0;   // -5 E / sigma^3 * ||w||_2^2
  double norm2 = 0.0;   // ||w||_2 after mean removal
  double removed_mean = 0.0;
  bool satisfied = false;
};

StabilityForm stability_form(const SurfaceGeometry& geo, const Field& w, double energy);

struct RefinedEigenCheck {
  double r[3] = {0, 0, 0};  // |lambda_i - hbar^2/2 - 6 m_H / sigma^3 - <Ric f_i^2>|
  double cross_max = 0.0;   // max off-diagonal |<Ric f_i, f_j>|
  int aligned_axis[3] = {-1, -1, -1};
  double c_inf = 0.0;       // sigma^2 * ||Hq - hbar||_inf, logged only
  double c_2 = 0.0;         // sigma * ||Hq - hbar||_2, logged only
};

// hq_field is the generalized mean curvature used to evaluate hbar and the
// logged compatibility constants.
RefinedEigenCheck refined_eigen_check(const SurfaceGeometry& geo, const EigenSystem& eigs,
                                      double hawking, const Field& hq_field);

}  // namespace stmc
