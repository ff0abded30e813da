#pragma once

#include <array>
#include <string>
#include <vector>

#include "stmc/ambient.hpp"
#include "stmc/grid.hpp"

namespace stmc {

// Closed surface represented as a radial graph |x - center| = rho(theta, phi)
// over the quadrature sphere.
struct GraphSurface {
  Vec3 center = Vec3::Zero();
  Field rho;
  SphericalGrid grid;

  static GraphSurface sphere(const SphericalGrid& g, const Vec3& center, double radius);

  // Under-resolution indicator: spectral tail energy fraction of rho.
  double tail_fraction() const { return grid.tail_energy_fraction(rho); }
  bool underresolved() const { return tail_fraction() > 0.10; }
};

// Everything geometric evaluated per node. Indices 1, 2 refer to the chart
// directions (theta, phi).
struct SurfaceGeometry {
  SphericalGrid grid;
  Vec3 center = Vec3::Zero();

  std::vector<Vec3> pos, t1, t2, nu;
  std::vector<Mat3> amb_g;  // ambient metric at the node

  Field g11, g12, g22;     // induced metric
  Field gi11, gi12, gi22;  // its inverse
  Field dmu;               // area element times quadrature weight
  Field h11, h12, h22;     // second fundamental form
  Field H, A2, Aring2;     // mean curvature, |A|^2, |A - (H/2)g|^2
  Field kap1, kap2;        // principal curvatures
  Field ric_nu;            // ambient Ric(nu, nu)
  Field amb_scalar;        // ambient scalar curvature
  // Christoffel symbols of the induced metric.
  Field c111, c112, c122, c211, c212, c222;
  // g(nu, omega) with omega the coordinate-unit radial direction from center.
  Field nu_omega;

  double area = 0.0;
};

// Geometry of a radial graph. Throws DegenerateImmersionError if the induced
// metric loses rank and GraphBreakdownError if g(nu, omega) < 0.1 anywhere.
SurfaceGeometry geometry(const GraphSurface& s, const InitialDataSet& ids);

// Geometry of a general immersion given by its three Cartesian position
// fields. center is only used for the outward orientation of nu.
SurfaceGeometry immersion_geometry(const SphericalGrid& g, const std::array<Field, 3>& X,
                                   const InitialDataSet& ids, const Vec3& center);

double integrate(const Field& f, const SurfaceGeometry& geo);
double integral_mean(const Field& f, const SurfaceGeometry& geo);
// p must be one of 1, 2, 4 or infinity.
double lp_norm(const Field& f, const SurfaceGeometry& geo, double p);

struct ShapeReport {
  double area = 0.0;
  double sigma = 0.0;    // area radius sqrt(area / 4 pi)
  double r_min = 0.0;    // min |x| over nodes, distance from the chart origin
  double r_max = 0.0;
  double volume = 0.0;   // metric volume enclosed, rays clipped at r_min(kind)
  Vec3 barycenter = Vec3::Zero();
};

ShapeReport shape_report(const GraphSurface& s, const SurfaceGeometry& geo,
                         const InitialDataSet& ids);

// Laplace-Beltrami of the induced metric, via spectral chart derivatives.
Field surface_laplacian(const Field& f, const SurfaceGeometry& geo);

// Pointwise g(grad f, grad h) of two scalars.
Field grad_inner(const Field& f, const Field& h, const SurfaceGeometry& geo);
inline Field grad_norm2(const Field& f, const SurfaceGeometry& geo) {
  return grad_inner(f, f, geo);
}

// Covariant Hessian components in the chart.
struct HessField {
  Field h11, h12, h22;
};
HessField surface_hessian(const Field& f, const SurfaceGeometry& geo);

// JSON snapshot round-trip: {"center", "n_theta", "n_phi", "rho"} (row-major).
std::string surface_to_json(const GraphSurface& s);
GraphSurface surface_from_json(const std::string& text);

}  // namespace stmc
