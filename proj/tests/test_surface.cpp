#include <doctest.h>

#include <stmc/errors.hpp>
#include <stmc/surface.hpp>

#include <cmath>

using namespace stmc;

namespace {
constexpr double kPi = 3.14159265358979323846;

// mean curvature of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 at a point,
// from the divergence of the normalized gradient of the level function
double ellipsoid_H(const Vec3& p, double a, double b, double c) {
  Vec3 w(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
  Vec3 grad(2 * w[0] * p[0], 2 * w[1] * p[1], 2 * w[2] * p[2]);
  double gn = grad.norm();
  // H = (lap F |grad F|^2 - grad F . Hess F grad F) / |grad F|^3
  double lap = 2 * (w[0] + w[1] + w[2]);
  double quad = 8 * (w[0] * w[0] * w[0] * p[0] * p[0] +
                     w[1] * w[1] * w[1] * p[1] * p[1] +
                     w[2] * w[2] * w[2] * p[2] * p[2]);  // grad . Hess . grad
  return (lap * gn * gn - quad) / (gn * gn * gn);
}
}  // namespace

TEST_CASE("euclidean round sphere geometry is exact") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  double r = 3.0;
  GraphSurface s = GraphSurface::sphere(g, Vec3::Zero(), r);
  SurfaceGeometry geo = geometry(s, ids);

  CHECK(std::abs(geo.area - 4.0 * kPi * r * r) < 1e-10 * geo.area);
  CHECK((geo.H - 2.0 / r).abs().maxCoeff() < 1e-10);
  CHECK((geo.A2 - 2.0 / (r * r)).abs().maxCoeff() < 1e-10);
  CHECK(geo.Aring2.abs().maxCoeff() < 1e-10);
  CHECK((geo.kap1 - 1.0 / r).abs().maxCoeff() < 5e-8);
  CHECK((geo.kap2 - 1.0 / r).abs().maxCoeff() < 5e-8);
  CHECK((geo.nu_omega - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(geo.ric_nu.abs().maxCoeff() < 1e-13);
}

TEST_CASE("ellipsoid mean curvature matches the level set formula") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(32, 64);
  double a = 2.0, b = 2.0, c = 2.4;
  Field rho(g.size());
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      int k = g.index(i, j);
      double st = g.sin_theta()[k], ct = g.cos_theta()[k];
      Vec3 w(st * std::cos(g.phi(j)), st * std::sin(g.phi(j)), ct);
      rho[k] = 1.0 / std::sqrt(w[0] * w[0] / (a * a) + w[1] * w[1] / (b * b) +
                               w[2] * w[2] / (c * c));
    }
  SurfaceGeometry geo = geometry(GraphSurface{Vec3::Zero(), rho, g}, ids);
  double worst = 0.0;
  for (int k = 0; k < g.size(); ++k)
    worst = std::max(worst, std::abs(geo.H[k] - ellipsoid_H(geo.pos[k], a, b, c)));
  CHECK(worst < 1e-7);
}

TEST_CASE("centered sphere in the mass metric matches the radial formula") {
  double m = 1.2, r = 8.0;
  InitialDataSet ids = InitialDataSet::schwarzschild(m);
  SphericalGrid g = SphericalGrid::build(16, 32);
  SurfaceGeometry geo = geometry(GraphSurface::sphere(g, Vec3::Zero(), r), ids);
  double u = 1.0 + m / (2.0 * r), up = -m / (2.0 * r * r);
  double Hexp = (2.0 / r + 4.0 * up / u) / (u * u);
  CHECK((geo.H - Hexp).abs().maxCoeff() < 1e-11);
  CHECK(std::abs(geo.area - 4.0 * kPi * std::pow(u, 4) * r * r) < 1e-9 * geo.area);
  CHECK(geo.Aring2.abs().maxCoeff() < 1e-12);  // umbilic
}

TEST_CASE("shape report volume and barycenter against closed forms") {
  InitialDataSet eu = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  Vec3 c0(0.5, -0.25, 1.0);
  GraphSurface s = GraphSurface::sphere(g, c0, 2.0);
  ShapeReport rep = shape_report(s, geometry(s, eu), eu);
  CHECK(std::abs(rep.volume - 4.0 * kPi * 8.0 / 3.0) < 1e-8);
  CHECK((rep.barycenter - c0).norm() < 1e-10);
  CHECK(std::abs(rep.sigma - 2.0) < 1e-10);
  CHECK(std::abs(rep.r_min - (2.0 - c0.norm())) < 0.01);  // node sampling
  CHECK(std::abs(rep.r_max - (2.0 + c0.norm())) < 0.01);

  // curved case: radial integral of the conformal volume element
  double m = 1.0, r = 6.0;
  InitialDataSet sc = InitialDataSet::schwarzschild(m);
  GraphSurface s2 = GraphSurface::sphere(g, Vec3::Zero(), r);
  ShapeReport rep2 = shape_report(s2, geometry(s2, sc), sc);
  // 4 pi Int (1 + m/2s)^6 s^2 ds from the excluded ball to r, 10k midpoint steps
  double lo = sc.r_min(), acc = 0.0;
  int n = 200000;
  double ds = (r - lo) / n;
  for (int i = 0; i < n; ++i) {
    double sr = lo + (i + 0.5) * ds;
    acc += std::pow(1.0 + m / (2.0 * sr), 6) * sr * sr * ds;
  }
  CHECK(std::abs(rep2.volume - 4.0 * kPi * acc) < 1e-5 * rep2.volume);
}

TEST_CASE("norms and means use the surface measure") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  SurfaceGeometry geo = geometry(GraphSurface::sphere(g, Vec3::Zero(), 2.0), ids);
  Field one = Field::Ones(g.size());
  CHECK(std::abs(integrate(one, geo) - geo.area) < 1e-10 * geo.area);
  CHECK(std::abs(integral_mean((3.0 * one).eval(), geo) - 3.0) < 1e-12);
  Field y = real_harmonic(g, 2, 1);
  double l2 = lp_norm(y, geo, 2.0);
  CHECK(std::abs(l2 * l2 - 4.0) < 1e-9);  // r^2 from the measure, unit L2 on S^2
  CHECK(lp_norm(y, geo, INFINITY) == y.abs().maxCoeff());
  CHECK_THROWS_AS(lp_norm(y, geo, 3.0), ConfigError);
}

TEST_CASE("surface laplacian reproduces sphere eigenvalues") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(24, 48);
  double r = 2.5;
  SurfaceGeometry geo = geometry(GraphSurface::sphere(g, Vec3::Zero(), r), ids);
  for (auto [l, m] : {std::pair{1, 0}, {2, 2}, {4, -3}}) {
    Field y = real_harmonic(g, l, m);
    Field lap = surface_laplacian(y, geo);
    CHECK((lap + (l * (l + 1) / (r * r)) * y).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("gradient and hessian are compatible with the laplacian") {
  InitialDataSet ids = InitialDataSet::perturbed(5, 0.08);
  SphericalGrid g = SphericalGrid::build(24, 48);
  Field rho = Field::Constant(g.size(), 4.0) * (1.0 + 0.1 * real_harmonic(g, 3, 1));
  SurfaceGeometry geo = geometry(GraphSurface{Vec3::Zero(), rho.eval(), g}, ids);
  Field f = real_harmonic(g, 2, -1) + 0.5 * real_harmonic(g, 4, 2);

  // trace of the covariant hessian is the laplacian
  HessField hf = surface_hessian(f, geo);
  Field tr = geo.gi11 * hf.h11 + 2.0 * geo.gi12 * hf.h12 + geo.gi22 * hf.h22;
  CHECK((tr - surface_laplacian(f, geo)).abs().maxCoeff() < 1e-7);

  // integration by parts: Int |grad f|^2 = -Int f lap f
  double lhs = integrate(grad_norm2(f, geo), geo);
  double rhs = -integrate((f * surface_laplacian(f, geo)).eval(), geo);
  CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("snapshot json round-trips exactly") {
  SphericalGrid g = SphericalGrid::build(8, 16);
  Field rho = Field::Constant(g.size(), 2.0) * (1.0 + 0.05 * real_harmonic(g, 2, 2));
  GraphSurface s{Vec3(0.1, -0.2, 0.3), rho.eval(), g};
  GraphSurface back = surface_from_json(surface_to_json(s));
  CHECK((back.center - s.center).norm() == 0.0);
  CHECK((back.rho - s.rho).abs().maxCoeff() == 0.0);
  CHECK(back.grid.n_theta() == 8);
  CHECK_THROWS_AS(surface_from_json("{\"center\":[0,0,0],\"n_theta\":8,"
                                    "\"n_phi\":16,\"rho\":[1.0]}"),
                  ConfigError);
}

TEST_CASE("degenerate graphs are rejected") {
  InitialDataSet ids = InitialDataSet::euclidean();
  SphericalGrid g = SphericalGrid::build(16, 32);
  Field rho = Field::Constant(g.size(), 1.0);
  rho[5] = -0.1;
  CHECK_THROWS_AS(geometry(GraphSurface{Vec3::Zero(), rho, g}, ids), ConfigError);

  // a violently sheared graph loses transversality to the rays
  Field bad = (3.0 * real_harmonic(g, 6, 5)).exp();
  CHECK_THROWS(geometry(GraphSurface{Vec3::Zero(), bad.eval(), g}, ids));

  InitialDataSet sc = InitialDataSet::schwarzschild(4.0);
  CHECK_THROWS_AS(geometry(GraphSurface::sphere(g, Vec3::Zero(), 1.0), sc), DomainError);
}

TEST_CASE("under-resolution indicator reacts to rough graphs") {
  SphericalGrid g = SphericalGrid::build(16, 32);
  GraphSurface smooth = GraphSurface::sphere(g, Vec3::Zero(), 1.0);
  CHECK_FALSE(smooth.underresolved());
  int ltop = g.lmax() - 1;
  Field rough =
      Field::Constant(g.size(), 1.0) + 0.5 * real_harmonic(g, ltop, 2);
  CHECK(GraphSurface{Vec3::Zero(), rough.eval(), g}.underresolved());
}
