#include "stmc/spectral.hpp"

#include <cmath>

#include "stmc/errors.hpp"

namespace stmc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EigenSystem laplace_eigs(const SurfaceGeometry& geo, int k) {
  const auto& g = geo.grid;
  if (k < 1 || k > g.size() / 4) throw ConfigError("laplace_eigs: need 1 <= k <= size/4");

  // Basis degree: enough harmonics to span k modes plus a safety margin,
  // clipped to what the grid can represent without aliasing.
  int L = 1;
  while ((L + 1) * (L + 1) < k) ++L;
  L += 2;
  L = std::min(L, std::min(g.lmax() - 1, g.mmax()));
  const int nb = (L + 1) * (L + 1);
  if (nb < k) throw ConfigError("laplace_eigs: grid too small for requested k");

  std::vector<Field> basis;
  std::vector<FieldJet> jets;
  basis.reserve(nb);
  jets.reserve(nb);
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      basis.push_back(real_harmonic(g, l, m));
      jets.push_back(g.jet(basis.back()));
    }

  Eigen::MatrixXd A(nb, nb), M(nb, nb);
  for (int a = 0; a < nb; ++a)
    for (int b = a; b < nb; ++b) {
      Field stiff = geo.gi11 * jets[a].dth * jets[b].dth +
                    geo.gi12 * (jets[a].dth * jets[b].dph + jets[a].dph * jets[b].dth) +
                    geo.gi22 * jets[a].dph * jets[b].dph;
      A(a, b) = A(b, a) = (stiff * geo.dmu).sum();
      M(a, b) = M(b, a) = (basis[a] * basis[b] * geo.dmu).sum();
    }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  if (es.info() != Eigen::Success)
    throw NumericError("laplace_eigs: generalized eigensolver failed, basis size " +
                       std::to_string(nb));

  EigenSystem out;
  out.basis_degree = L;
  out.lambda.resize(k);
  out.fields.resize(k);
  for (int i = 0; i < k; ++i) {
    out.lambda[i] = es.eigenvalues()[i];
    Eigen::VectorXd c = es.eigenvectors().col(i);
    int lead;
    c.cwiseAbs().maxCoeff(&lead);
    if (c[lead] < 0) c = -c;
    Field f = Field::Zero(g.size());
    for (int b = 0; b < nb; ++b) f += c[b] * basis[b];
    out.fields[i] = f;
  }
  double worst = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      double ip = integrate((out.fields[i] * out.fields[j]).eval(), geo);
      worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  out.ortho_residual = worst;
  return out;
}

Field stability_apply(const SurfaceGeometry& geo, const Field& w) {
  return surface_laplacian(w, geo) + (geo.A2 + geo.ric_nu) * w;
}

SplitField translational_split(const Field& w, const EigenSystem& eigs,
                               const SurfaceGeometry& geo) {
  if (eigs.fields.size() < 4)
    throw ConfigError("translational_split: need at least 4 eigenpairs");
  SplitField out;
  double mean = integral_mean(w, geo);
  out.w0 = Field::Constant(w.size(), mean);
  out.wt = Field::Zero(w.size());
  for (int i = 1; i <= 3; ++i)
    out.wt += integrate((w * eigs.fields[i]).eval(), geo) * eigs.fields[i];
  out.wd = w - out.w0 - out.wt;
  out.degenerate_warning =
      eigs.lambda.size() > 4 && std::abs(eigs.lambda[3] - eigs.lambda[4]) < 1e-10;
  return out;
}

StabilityForm stability_form(const SurfaceGeometry& geo, const Field& w, double energy) {
  StabilityForm out;
  out.removed_mean = integral_mean(w, geo);
  Field u = w - out.removed_mean;
  // Weak form: - int |grad u|^2 + int (|A|^2 + Ric(nu,nu)) u^2.
  out.value =
      -integrate(grad_norm2(u, geo), geo) + integrate(((geo.A2 + geo.ric_nu) * u * u).eval(), geo);
  out.norm2 = lp_norm(u, geo, 2.0);
  double sigma = std::sqrt(geo.area / (4.0 * kPi));
  out.bound = -5.0 * energy / (sigma * sigma * sigma) * out.norm2 * out.norm2;
  out.satisfied = out.value <= out.bound + 1e-14;
  return out;
}

RefinedEigenCheck refined_eigen_check(const SurfaceGeometry& geo, const EigenSystem& eigs,
                                      double hawking, const Field& hq_field) {
  if (eigs.fields.size() < 4)
    throw ConfigError("refined_eigen_check: need at least 4 eigenpairs");
  RefinedEigenCheck out;
  double sigma = std::sqrt(geo.area / (4.0 * kPi));
  double hbar = integral_mean(hq_field, geo);
  Field dev = hq_field - hbar;
  out.c_inf = sigma * sigma * dev.abs().maxCoeff();
  out.c_2 = sigma * lp_norm(dev, geo, 2.0);

  for (int i = 1; i <= 3; ++i) {
    double ric_ii = integrate((geo.ric_nu * eigs.fields[i] * eigs.fields[i]).eval(), geo);
    out.r[i - 1] = std::abs(eigs.lambda[i] - 0.5 * hbar * hbar -
                            6.0 * hawking / (sigma * sigma * sigma) - ric_ii);
    double best = -1.0;
    for (int ax = 0; ax < 3; ++ax) {
      Field coord(geo.grid.size());
      for (int n = 0; n < geo.grid.size(); ++n) coord[n] = geo.pos[n][ax] - geo.center[ax];
      double nrm = lp_norm(coord, geo, 2.0);
      double al = std::abs(integrate((coord * eigs.fields[i]).eval(), geo)) / nrm;
      if (al > best) {
        best = al;
        out.aligned_axis[i - 1] = ax;
      }
    }
  }
  double cm = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      cm = std::max(cm, std::abs(integrate(
                            (geo.ric_nu * eigs.fields[i] * eigs.fields[j]).eval(), geo)));
  out.cross_max = cm;
  return out;
}

}  // namespace stmc
