#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

namespace stmc {

// Scalar field sampled on a spherical grid, row-major: index = i*n_phi + j
// with i the colatitude index and j the longitude index.
using Field = Eigen::ArrayXd;

// Spherical harmonic coefficients of a real field. Only m >= 0 is stored;
// the m < 0 half follows from conjugation symmetry. Layout: for m = 0..mmax,
// l = m..lmax, flat index offset(m) + (l - m).
struct ShCoeffs {
  int lmax = 0;
  int mmax = 0;
  std::vector<std::complex<double>> a;

  int offset(int m) const { return m * (lmax + 2) - (m * (m + 1)) / 2; }
  std::complex<double>& at(int l, int m) { return a[offset(m) + (l - m)]; }
  std::complex<double> at(int l, int m) const { return a[offset(m) + (l - m)]; }
};

// Value and first/second chart derivatives of a field, synthesized from a
// single harmonic analysis. Derivatives are with respect to (theta, phi).
struct FieldJet {
  Field f, dth, dph, dthth, dthph, dphph;
};

// Gauss-Legendre (colatitude) x uniform (longitude) grid with cached
// associated Legendre tables. Cheap to copy; state is shared and immutable.
class SphericalGrid {
 public:
  static SphericalGrid build(int n_theta, int n_phi);

  int n_theta() const;
  int n_phi() const;
  int size() const { return n_theta() * n_phi(); }
  int lmax() const;
  int mmax() const;

  double theta(int i) const;
  double phi(int j) const;
  // Quadrature weight for solid-angle integrals: sum over nodes of w = 4*pi.
  double weight(int i, int j) const;
  const Field& weights() const;  // all node weights, same layout as Field
  const Field& cos_theta() const;
  const Field& sin_theta() const;

  int index(int i, int j) const { return i * n_phi() + j; }

  // Integral over the unit sphere with the grid measure sin(theta) dtheta dphi.
  double integrate_sphere(const Field& f) const;

  ShCoeffs analyze(const Field& f) const;
  Field synthesize(const ShCoeffs& c) const;
  FieldJet jet(const Field& f) const;
  FieldJet jet(const ShCoeffs& c) const;

  // Fraction of spectral energy in the top third of resolvable degrees.
  // Used to flag under-resolved graph functions.
  double tail_energy_fraction(const Field& f) const;

  bool operator==(const SphericalGrid& o) const { return impl_ == o.impl_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Real basis function of the grid's harmonic space, unit L2 norm on S^2.
// k enumerates (l, m) pairs as l = 0, 1, ... with m = 0, then cos, sin pairs.
Field real_harmonic(const SphericalGrid& g, int l, int m);

// Evaluate a coefficient block at an arbitrary point of the sphere (used for
// re-anchoring a graph to a new center, where the nodes move).
double sh_eval(const ShCoeffs& c, double theta, double phi);

}  // namespace stmc
