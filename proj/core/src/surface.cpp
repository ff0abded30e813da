#include "stmc/surface.hpp"

#include <cmath>

#include <json.hpp>

#include "stmc/errors.hpp"

namespace stmc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GraphSurface GraphSurface::sphere(const SphericalGrid& g, const Vec3& center,
                                  double radius) {
  if (radius <= 0.0) throw ConfigError("sphere: radius must be positive");
  GraphSurface s;
  s.center = center;
  s.grid = g;
  s.rho = Field::Constant(g.size(), radius);
  return s;
}

SurfaceGeometry immersion_geometry(const SphericalGrid& g, const std::array<Field, 3>& X,
                                   const InitialDataSet& ids, const Vec3& center) {
  for (const auto& f : X)
    if (!f.isFinite().all()) throw NumericError("immersion: non-finite position field");

  const int n = g.size();
  SurfaceGeometry geo;
  geo.grid = g;
  geo.center = center;
  geo.pos.resize(n);
  geo.t1.resize(n);
  geo.t2.resize(n);
  geo.nu.resize(n);
  geo.amb_g.resize(n);
  for (Field* f : {&geo.g11, &geo.g12, &geo.g22, &geo.gi11, &geo.gi12, &geo.gi22,
                   &geo.dmu, &geo.h11, &geo.h12, &geo.h22, &geo.H, &geo.A2, &geo.Aring2,
                   &geo.kap1, &geo.kap2, &geo.ric_nu, &geo.amb_scalar, &geo.c111,
                   &geo.c112, &geo.c122, &geo.c211, &geo.c212, &geo.c222, &geo.nu_omega})
    f->setZero(n);

  std::array<FieldJet, 3> J = {g.jet(X[0]), g.jet(X[1]), g.jet(X[2])};

  double min_no = 1e300;
  for (int k = 0; k < n; ++k) {
    Vec3 F(X[0][k], X[1][k], X[2][k]);
    Vec3 t1(J[0].dth[k], J[1].dth[k], J[2].dth[k]);
    Vec3 t2(J[0].dph[k], J[1].dph[k], J[2].dph[k]);
    Vec3 d11(J[0].dthth[k], J[1].dthth[k], J[2].dthth[k]);
    Vec3 d12(J[0].dthph[k], J[1].dthph[k], J[2].dthph[k]);
    Vec3 d22(J[0].dphph[k], J[1].dphph[k], J[2].dphph[k]);

    MetricJet mj = ids.metric_jet(F);
    CurvatureData cd = curvature(mj);
    const Mat3& G = mj.g;

    double g11 = t1.dot(G * t1), g12 = t1.dot(G * t2), g22 = t2.dot(G * t2);
    double det = g11 * g22 - g12 * g12;
    if (!(det > 0.0) || g11 <= 0.0)
      throw DegenerateImmersionError("induced metric degenerate at node " +
                                     std::to_string(k));
    double gi11 = g22 / det, gi12 = -g12 / det, gi22 = g11 / det;

    Vec3 ncov = t1.cross(t2);  // covector annihilating the tangent plane
    Vec3 nu = G.inverse() * ncov;
    nu /= std::sqrt(nu.dot(G * nu));
    Vec3 rad = F - center;
    double rn = rad.norm();
    if (rn < 1e-14) throw DegenerateImmersionError("surface point hit the center");
    Vec3 omega = rad / rn;
    double no = nu.dot(G * omega);
    if (no < 0.0) {
      nu = -nu;
      no = -no;
    }
    min_no = std::min(min_no, no);

    // Second derivatives of the immersion corrected by ambient Christoffels.
    auto cov2 = [&](const Vec3& d2, const Vec3& a, const Vec3& b) {
      Vec3 out = d2;
      for (int c = 0; c < 3; ++c) out[c] += a.dot(cd.gamma[c] * b);
      return out;
    };
    Vec3 D11 = cov2(d11, t1, t1), D12 = cov2(d12, t1, t2), D22 = cov2(d22, t2, t2);
    double h11 = -D11.dot(G * nu), h12 = -D12.dot(G * nu), h22 = -D22.dot(G * nu);

    // Shape operator g^{-1} h; |A|^2 = tr(S^2), principal curvatures are its
    // eigenvalues.
    double s11 = gi11 * h11 + gi12 * h12, s12 = gi11 * h12 + gi12 * h22;
    double s21 = gi12 * h11 + gi22 * h12, s22 = gi12 * h12 + gi22 * h22;
    double H = s11 + s22;
    double A2 = s11 * s11 + 2.0 * s12 * s21 + s22 * s22;
    double deth = h11 * h22 - h12 * h12;
    double K = deth / det;  // extrinsic Gauss curvature det(g^-1 h)
    double disc = std::max(0.0, H * H - 4.0 * K);
    double k1 = 0.5 * (H - std::sqrt(disc)), k2 = 0.5 * (H + std::sqrt(disc));
    double Aring2 = std::max(0.0, A2 - 0.5 * H * H);

    // Christoffels of the induced metric via tangential projection.
    auto proj = [&](const Vec3& D, double& c1, double& c2) {
      double b1 = D.dot(G * t1), b2 = D.dot(G * t2);
      c1 = gi11 * b1 + gi12 * b2;
      c2 = gi12 * b1 + gi22 * b2;
    };
    proj(D11, geo.c111[k], geo.c211[k]);
    proj(D12, geo.c112[k], geo.c212[k]);
    proj(D22, geo.c122[k], geo.c222[k]);

    geo.pos[k] = F;
    geo.t1[k] = t1;
    geo.t2[k] = t2;
    geo.nu[k] = nu;
    geo.amb_g[k] = G;
    geo.g11[k] = g11;
    geo.g12[k] = g12;
    geo.g22[k] = g22;
    geo.gi11[k] = gi11;
    geo.gi12[k] = gi12;
    geo.gi22[k] = gi22;
    geo.dmu[k] = std::sqrt(det) / g.sin_theta()[k] * g.weights()[k];
    geo.h11[k] = h11;
    geo.h12[k] = h12;
    geo.h22[k] = h22;
    geo.H[k] = H;
    geo.A2[k] = A2;
    geo.Aring2[k] = Aring2;
    geo.kap1[k] = k1;
    geo.kap2[k] = k2;
    geo.ric_nu[k] = nu.dot(cd.ric * nu);
    geo.amb_scalar[k] = cd.scalar;
    geo.nu_omega[k] = no;
  }
  geo.area = geo.dmu.sum();
  if (min_no < 0.1)
    throw GraphBreakdownError("surface nearly tangent to the radial direction, g(nu,omega)=" +
                              std::to_string(min_no));
  return geo;
}

SurfaceGeometry geometry(const GraphSurface& s, const InitialDataSet& ids) {
  const auto& g = s.grid;
  if (!(s.rho > 0.0).all()) throw ConfigError("graph surface: rho must be positive");
  std::array<Field, 3> X;
  const int n = g.size();
  for (auto& f : X) f.resize(n);
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      int k = g.index(i, j);
      double st = g.sin_theta()[k], ct = g.cos_theta()[k];
      double cp = std::cos(g.phi(j)), sp = std::sin(g.phi(j));
      Vec3 w(st * cp, st * sp, ct);
      Vec3 p = s.center + s.rho[k] * w;
      if (p.norm() < ids.r_min())
        throw DomainError("graph surface dips inside the excluded ball");
      X[0][k] = p[0];
      X[1][k] = p[1];
      X[2][k] = p[2];
    }
  return immersion_geometry(g, X, ids, s.center);
}

double integrate(const Field& f, const SurfaceGeometry& geo) {
  return (f * geo.dmu).sum();
}

double integral_mean(const Field& f, const SurfaceGeometry& geo) {
  return integrate(f, geo) / geo.area;
}

double lp_norm(const Field& f, const SurfaceGeometry& geo, double p) {
  if (std::isinf(p)) return f.abs().maxCoeff();
  if (p == 1.0) return integrate(f.abs(), geo);
  if (p == 2.0) return std::sqrt(integrate(f.square(), geo));
  if (p == 4.0) return std::pow(integrate(f.square().square(), geo), 0.25);
  throw ConfigError("lp_norm: p must be 1, 2, 4 or inf");
}

namespace {

// 1-D Gauss-Legendre rule on [a, b] for the radial volume integrals.
void gl16(double a, double b, std::vector<double>& x, std::vector<double>& w) {
  static const double xs[8] = {0.0950125098376374, 0.2816035507792589,
                               0.4580167776572274, 0.6178762444026438,
                               0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double ws[8] = {0.1894506104550685, 0.1826034150449236,
                               0.1691565193950025, 0.1495959888165767,
                               0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  x.clear();
  w.clear();
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < 8; ++i) {
    x.push_back(c - h * xs[i]);
    w.push_back(h * ws[i]);
    x.push_back(c + h * xs[i]);
    w.push_back(h * ws[i]);
  }
}

}  // namespace

ShapeReport shape_report(const GraphSurface& s, const SurfaceGeometry& geo,
                         const InitialDataSet& ids) {
  ShapeReport rep;
  rep.area = geo.area;
  rep.sigma = std::sqrt(geo.area / (4.0 * kPi));
  double rmin = 1e300, rmax = 0.0;
  Vec3 bary = Vec3::Zero();
  for (int k = 0; k < s.grid.size(); ++k) {
    double r = geo.pos[k].norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    bary += geo.pos[k] * geo.dmu[k];
  }
  rep.r_min = rmin;
  rep.r_max = rmax;
  rep.barycenter = bary / geo.area;

  // Enclosed volume by radial quadrature from the graph center. Rays are
  // clipped where they leave the chart domain |x| >= r_min(kind); for the
  // built-in curved data sets the compact core is never integrated over.
  double vol = 0.0;
  const auto& g = s.grid;
  std::vector<double> xs, ws;
  for (int k = 0; k < g.size(); ++k) {
    Vec3 omega = (geo.pos[k] - s.center).normalized();
    double slo = 0.0;
    double rc = ids.r_min();
    if (rc > 0.0) {
      // largest root of |center + s omega| = r_min, if any
      double b = s.center.dot(omega);
      double c = s.center.squaredNorm() - rc * rc;
      double disc = b * b - c;
      if (disc >= 0.0) slo = std::max(0.0, -b + std::sqrt(disc));
    }
    double shi = s.rho[k];
    if (shi <= slo) continue;
    gl16(slo, shi, xs, ws);
    double acc = 0.0;
    for (size_t q = 0; q < xs.size(); ++q) {
      Vec3 p = s.center + xs[q] * omega;
      double rootdet = std::sqrt(ids.metric_jet(p).g.determinant());
      acc += ws[q] * rootdet * xs[q] * xs[q];
    }
    vol += acc * g.weights()[k];
  }
  rep.volume = vol;
  return rep;
}

Field surface_laplacian(const Field& f, const SurfaceGeometry& geo) {
  FieldJet j = geo.grid.jet(f);
  return geo.gi11 * (j.dthth - geo.c111 * j.dth - geo.c211 * j.dph) +
         2.0 * geo.gi12 * (j.dthph - geo.c112 * j.dth - geo.c212 * j.dph) +
         geo.gi22 * (j.dphph - geo.c122 * j.dth - geo.c222 * j.dph);
}

Field grad_inner(const Field& f, const Field& h, const SurfaceGeometry& geo) {
  FieldJet a = geo.grid.jet(f);
  FieldJet b = geo.grid.jet(h);
  return geo.gi11 * a.dth * b.dth + geo.gi12 * (a.dth * b.dph + a.dph * b.dth) +
         geo.gi22 * a.dph * b.dph;
}

HessField surface_hessian(const Field& f, const SurfaceGeometry& geo) {
  FieldJet j = geo.grid.jet(f);
  HessField out;
  out.h11 = j.dthth - geo.c111 * j.dth - geo.c211 * j.dph;
  out.h12 = j.dthph - geo.c112 * j.dth - geo.c212 * j.dph;
  out.h22 = j.dphph - geo.c122 * j.dth - geo.c222 * j.dph;
  return out;
}

std::string surface_to_json(const GraphSurface& s) {
  nlohmann::json j;
  j["center"] = {s.center[0], s.center[1], s.center[2]};
  j["n_theta"] = s.grid.n_theta();
  j["n_phi"] = s.grid.n_phi();
  j["rho"] = std::vector<double>(s.rho.data(), s.rho.data() + s.rho.size());
  return j.dump();
}

GraphSurface surface_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GraphSurface s;
  auto c = j.at("center");
  s.center = Vec3(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
  int nt = j.at("n_theta").get<int>(), np = j.at("n_phi").get<int>();
  s.grid = SphericalGrid::build(nt, np);
  auto rho = j.at("rho").get<std::vector<double>>();
  if ((int)rho.size() != nt * np) throw ConfigError("surface json: rho size mismatch");
  s.rho = Eigen::Map<const Eigen::ArrayXd>(rho.data(), rho.size());
  return s;
}

}  // namespace stmc
