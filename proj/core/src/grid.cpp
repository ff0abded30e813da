#include "stmc/grid.hpp"

#include <cmath>

#include "stmc/errors.hpp"

namespace stmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes (as cos(theta), descending => theta ascending) and
// weights on [-1, 1], by Newton iteration on the three-term recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double z = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[k] = z;
    x[n - 1 - k] = -z;
    w[k] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - k] = w[k];
  }
}

}  // namespace

struct SphericalGrid::Impl {
  int nt = 0, np = 0, lmax = 0, mmax = 0;
  std::vector<double> th, ph, wth;
  Field wall, cth, sth;
  // Normalized associated Legendre tables and their theta derivatives,
  // per node row i: index idx(l, m) as in ShCoeffs.
  std::vector<std::vector<double>> P, dP, ddP;
  // exp(i m phi_j) for m = 0..mmax.
  std::vector<std::vector<std::complex<double>>> eimp;

  int coff(int m) const { return m * (lmax + 2) - (m * (m + 1)) / 2; }
  int idx(int l, int m) const { return coff(m) + (l - m); }
  int ncoef() const { return coff(mmax) + (lmax - mmax + 1); }
};

SphericalGrid SphericalGrid::build(int n_theta, int n_phi) {
  if (n_theta < 8 || n_phi < 16 || n_phi % 2 != 0)
    throw ConfigError("grid: need n_theta >= 8 and even n_phi >= 16");
  auto im = std::make_shared<Impl>();
  im->nt = n_theta;
  im->np = n_phi;
  im->lmax = n_theta - 1;
  im->mmax = std::min(im->lmax, n_phi / 2 - 1);

  std::vector<double> x;
  gauss_legendre(n_theta, x, im->wth);
  im->th.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) im->th[i] = std::acos(x[i]);
  im->ph.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) im->ph[j] = 2.0 * kPi * j / n_phi;

  int n = n_theta * n_phi;
  im->wall.resize(n);
  im->cth.resize(n);
  im->sth.resize(n);
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) {
      int k = i * n_phi + j;
      im->wall[k] = im->wth[i] * 2.0 * kPi / n_phi;
      im->cth[k] = x[i];
      im->sth[k] = std::sin(im->th[i]);
    }

  const int L = im->lmax, M = im->mmax;
  im->P.assign(n_theta, std::vector<double>(im->ncoef(), 0.0));
  im->dP = im->P;
  im->ddP = im->P;
  for (int i = 0; i < n_theta; ++i) {
    double c = x[i];
    double s = std::sin(im->th[i]);  // > 0, Gauss nodes avoid the poles
    auto& P = im->P[i];
    auto& dP = im->dP[i];
    auto& ddP = im->ddP[i];
    // Diagonal start, fully normalized: Pbar_00 = 1/sqrt(4 pi),
    // Pbar_mm = -sqrt((2m+1)/(2m)) * s * Pbar_{m-1,m-1}.
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 0; m <= M; ++m) {
      if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      P[im->idx(m, m)] = pmm;
      if (m + 1 <= L) P[im->idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * c * pmm;
      for (int l = m + 2; l <= L; ++l) {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                             (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        P[im->idx(l, m)] = a * (c * P[im->idx(l - 1, m)] - b * P[im->idx(l - 2, m)]);
      }
      // d/dtheta via (l x Pbar_lm - e_lm Pbar_{l-1,m}) / sin(theta),
      // then the Legendre ODE closes the second derivative.
      for (int l = m; l <= L; ++l) {
        double below = (l > m) ? P[im->idx(l - 1, m)] : 0.0;
        double e = (l > 0) ? std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) /
                                       (2.0 * l - 1.0))
                           : 0.0;
        double d1 = (l * c * P[im->idx(l, m)] - e * below) / s;
        dP[im->idx(l, m)] = d1;
        ddP[im->idx(l, m)] =
            -(c / s) * d1 - (l * (l + 1.0) - double(m) * m / (s * s)) * P[im->idx(l, m)];
      }
    }
  }

  im->eimp.assign(M + 1, std::vector<std::complex<double>>(n_phi));
  for (int m = 0; m <= M; ++m)
    for (int j = 0; j < n_phi; ++j)
      im->eimp[m][j] = std::polar(1.0, m * im->ph[j]);

  SphericalGrid g;
  g.impl_ = im;
  return g;
}

int SphericalGrid::n_theta() const { return impl_->nt; }
int SphericalGrid::n_phi() const { return impl_->np; }
int SphericalGrid::lmax() const { return impl_->lmax; }
int SphericalGrid::mmax() const { return impl_->mmax; }
double SphericalGrid::theta(int i) const { return impl_->th[i]; }
double SphericalGrid::phi(int j) const { return impl_->ph[j]; }
double SphericalGrid::weight(int i, int j) const { return impl_->wall[index(i, j)]; }
const Field& SphericalGrid::weights() const { return impl_->wall; }
const Field& SphericalGrid::cos_theta() const { return impl_->cth; }
const Field& SphericalGrid::sin_theta() const { return impl_->sth; }

double SphericalGrid::integrate_sphere(const Field& f) const {
  return (f * impl_->wall).sum();
}

ShCoeffs SphericalGrid::analyze(const Field& f) const {
  const auto& im = *impl_;
  ShCoeffs c;
  c.lmax = im.lmax;
  c.mmax = im.mmax;
  c.a.assign(im.ncoef(), {0.0, 0.0});
  const double wphi = 2.0 * kPi / im.np;
  std::vector<std::complex<double>> fm(im.nt);
  for (int m = 0; m <= im.mmax; ++m) {
    for (int i = 0; i < im.nt; ++i) {
      std::complex<double> acc = 0.0;
      const double* row = f.data() + i * im.np;
      for (int j = 0; j < im.np; ++j) acc += row[j] * std::conj(im.eimp[m][j]);
      fm[i] = acc * wphi;
    }
    for (int l = m; l <= im.lmax; ++l) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < im.nt; ++i) acc += im.wth[i] * im.P[i][im.idx(l, m)] * fm[i];
      c.a[im.idx(l, m)] = acc;
    }
  }
  return c;
}

Field SphericalGrid::synthesize(const ShCoeffs& c) const {
  return jet(c).f;
}

FieldJet SphericalGrid::jet(const Field& f) const { return jet(analyze(f)); }

FieldJet SphericalGrid::jet(const ShCoeffs& c) const {
  const auto& im = *impl_;
  if (c.lmax != im.lmax || c.mmax != im.mmax)
    throw ConfigError("grid: coefficient block does not match this grid");
  FieldJet out;
  const int n = im.nt * im.np;
  for (Field* f : {&out.f, &out.dth, &out.dph, &out.dthth, &out.dthph, &out.dphph})
    f->setZero(n);

  std::vector<std::complex<double>> g0(im.nt), g1(im.nt), g2(im.nt);
  for (int m = 0; m <= im.mmax; ++m) {
    for (int i = 0; i < im.nt; ++i) {
      std::complex<double> a0 = 0.0, a1 = 0.0, a2 = 0.0;
      for (int l = m; l <= im.lmax; ++l) {
        auto a = c.a[im.idx(l, m)];
        a0 += a * im.P[i][im.idx(l, m)];
        a1 += a * im.dP[i][im.idx(l, m)];
        a2 += a * im.ddP[i][im.idx(l, m)];
      }
      g0[i] = a0;
      g1[i] = a1;
      g2[i] = a2;
    }
    const double fac = (m == 0) ? 1.0 : 2.0;
    for (int i = 0; i < im.nt; ++i) {
      for (int j = 0; j < im.np; ++j) {
        const std::complex<double> e = im.eimp[m][j];
        const int k = i * im.np + j;
        out.f[k] += fac * std::real(g0[i] * e);
        out.dth[k] += fac * std::real(g1[i] * e);
        out.dthth[k] += fac * std::real(g2[i] * e);
        if (m > 0) {
          const std::complex<double> ie(-e.imag(), e.real());  // i*e
          out.dph[k] += fac * m * std::real(g0[i] * ie);
          out.dthph[k] += fac * m * std::real(g1[i] * ie);
          out.dphph[k] -= fac * m * m * std::real(g0[i] * e);
        }
      }
    }
  }
  return out;
}

double SphericalGrid::tail_energy_fraction(const Field& f) const {
  const auto& im = *impl_;
  ShCoeffs c = analyze(f);
  double total = 0.0, tail = 0.0;
  const int lcut = (2 * im.lmax) / 3;
  for (int m = 0; m <= im.mmax; ++m)
    for (int l = std::max(1, m); l <= im.lmax; ++l) {
      double e = std::norm(c.a[im.idx(l, m)]) * ((m == 0) ? 1.0 : 2.0);
      total += e;
      if (l > lcut) tail += e;
    }
  // a nearly constant field has only round-off beyond l = 0; call it resolved
  double mean_energy = std::norm(c.at(0, 0));
  if (total <= 1e-26 * (mean_energy + total)) return 0.0;
  return total > 0.0 ? tail / total : 0.0;
}

double sh_eval(const ShCoeffs& c, double theta, double phi) {
  const double x = std::cos(theta), s = std::sin(theta);
  double out = 0.0;
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= c.mmax; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    double pl2 = 0.0, pl1 = pmm;  // P_{l-2,m}, P_{l-1,m} as l climbs
    std::complex<double> gm = c.at(m, m) * pmm;
    for (int l = m + 1; l <= c.lmax; ++l) {
      double p;
      if (l == m + 1) {
        p = std::sqrt(2.0 * m + 3.0) * x * pmm;
      } else {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                             (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        p = a * (x * pl1 - b * pl2);
      }
      gm += c.at(l, m) * p;
      pl2 = pl1;
      pl1 = p;
    }
    double fac = (m == 0) ? 1.0 : 2.0;
    out += fac * std::real(gm * std::polar(1.0, m * phi));
  }
  return out;
}

Field real_harmonic(const SphericalGrid& g, int l, int m) {
  if (l < 0 || l > g.lmax() || std::abs(m) > std::min(l, g.mmax()))
    throw ConfigError("real_harmonic: (l, m) outside grid band limit");
  ShCoeffs c;
  c.lmax = g.lmax();
  c.mmax = g.mmax();
  c.a.assign(c.offset(c.mmax) + (c.lmax - c.mmax + 1), {0.0, 0.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (m == 0)
    c.at(l, 0) = 1.0;
  else if (m > 0)
    c.at(l, m) = inv_sqrt2;
  else
    c.at(l, -m) = std::complex<double>(0.0, -inv_sqrt2);
  return g.synthesize(c);
}

}  // namespace stmc
