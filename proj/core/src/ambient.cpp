#include "stmc/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stmc/errors.hpp"

namespace stmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t& s) {
  return (splitmix64(s) >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

}  // namespace

std::string to_string(AmbientKind k) {
  switch (k) {
    case AmbientKind::euclidean: return "euclidean";
    case AmbientKind::schwarzschild: return "schwarzschild";
    case AmbientKind::schwarzschild_k: return "schwarzschild_k";
    case AmbientKind::perturbed: return "perturbed";
  }
  return "?";
}

InitialDataSet InitialDataSet::euclidean() {
  InitialDataSet s;
  s.kind_ = AmbientKind::euclidean;
  s.r_min_ = 0.0;
  return s;
}

InitialDataSet InitialDataSet::schwarzschild(double m) {
  if (m <= 0.0) throw ConfigError("schwarzschild: mass must be positive");
  InitialDataSet s;
  s.kind_ = AmbientKind::schwarzschild;
  s.m_ = m;
  s.r_min_ = 2.0;
  return s;
}

InitialDataSet InitialDataSet::schwarzschild_k(double m, double a, double e, double kappa) {
  InitialDataSet s = schwarzschild(m);
  if (e < 1.5 + s.delta_ - 1e-12)
    throw ConfigError("schwarzschild_k: decay exponent below 3/2 + delta");
  s.kind_ = AmbientKind::schwarzschild_k;
  s.a_ = a;
  s.e_ = e;
  s.kappa_ = kappa;
  s.k_on_ = true;
  return s;
}

InitialDataSet InitialDataSet::perturbed(std::uint64_t seed, double amplitude, double delta) {
  if (delta <= 0.0 || delta > 0.5) throw ConfigError("perturbed: need delta in (0, 1/2]");
  if (std::abs(amplitude) > 0.2) throw ConfigError("perturbed: |amplitude| too large");
  InitialDataSet s;
  s.kind_ = AmbientKind::perturbed;
  s.amp_ = amplitude;
  s.delta_ = delta;
  s.r_min_ = 2.0;
  std::uint64_t st = seed ^ 0xa02bdbf7bb3c0a7ULL;
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = 2.0 * unit_interval(st) - 1.0;
  double mx = m.cwiseAbs().maxCoeff();
  if (mx > 0) m /= mx;
  s.pert_m_ = m;
  return s;
}

bool InitialDataSet::has_extrinsic() const { return k_on_ && a_ != 0.0; }

InitialDataSet InitialDataSet::without_extrinsic() const {
  InitialDataSet s = *this;
  s.k_on_ = false;
  return s;
}

MetricJet InitialDataSet::metric_jet(const Vec3& x) const {
  const double r = x.norm();
  if (r < r_min_ - 1e-12) throw DomainError("metric_jet: point inside r_min");
  MetricJet out;
  out.g = Mat3::Identity();
  for (auto& m : out.dg) m.setZero();
  for (auto& row : out.ddg)
    for (auto& m : row) m.setZero();

  if (kind_ == AmbientKind::euclidean) return out;

  if (kind_ == AmbientKind::schwarzschild || kind_ == AmbientKind::schwarzschild_k) {
    if (r < 1e-12) throw DomainError("metric_jet: origin is singular");
    const double u = 1.0 + m_ / (2.0 * r);
    const double r3 = r * r * r, r5 = r3 * r * r;
    Vec3 du = -(m_ / 2.0) * x / r3;
    Mat3 ddu;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        ddu(a, b) = -(m_ / 2.0) * (((a == b) ? 1.0 : 0.0) / r3 - 3.0 * x[a] * x[b] / r5);
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
    out.g = u4 * Mat3::Identity();
    for (int c = 0; c < 3; ++c) out.dg[c] = 4.0 * u3 * du[c] * Mat3::Identity();
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d)
        out.ddg[c][d] =
            (12.0 * u2 * du[c] * du[d] + 4.0 * u3 * ddu(c, d)) * Mat3::Identity();
    return out;
  }

  // Pullback of the flat metric by y = x + xi, xi_b = A (M x)_b r^p.
  const double A = amp_, p = -0.5 - delta_;
  const Mat3& M = pert_m_;
  const Vec3 phi = M * x;
  const double rp = std::pow(r, p);
  const double rp2 = rp / (r * r), rp4 = rp2 / (r * r), rp6 = rp4 / (r * r);

  // dxi(a, b) = d_a xi_b
  Mat3 dxi;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      dxi(a, b) = A * (M(b, a) * rp + p * phi[b] * x[a] * rp2);

  // t2[c](a, b) = d_c d_a xi_b
  std::array<Mat3, 3> t2;
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double lin = M(b, a) * x[c] + M(b, c) * x[a] + phi[b] * ((a == c) ? 1.0 : 0.0);
        t2[c](a, b) = A * (p * lin * rp2 + p * (p - 2.0) * phi[b] * x[a] * x[c] * rp4);
      }

  // t3[d][c](a, b) = d_d d_c d_a xi_b
  std::array<std::array<Mat3, 3>, 3> t3;
  for (int d = 0; d < 3; ++d)
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          auto kr = [](int i, int j) { return i == j ? 1.0 : 0.0; };
          double lin = M(b, a) * x[c] + M(b, c) * x[a] + phi[b] * kr(a, c);
          double dlin = M(b, a) * kr(c, d) + M(b, c) * kr(a, d) + M(b, d) * kr(a, c);
          double cube = phi[b] * x[a] * x[c];
          double dcube = M(b, d) * x[a] * x[c] + phi[b] * kr(a, d) * x[c] +
                         phi[b] * x[a] * kr(c, d);
          t3[d][c](a, b) =
              A * (p * dlin * rp2 + p * (p - 2.0) * lin * x[d] * rp4 +
                   p * (p - 2.0) * dcube * rp4 +
                   p * (p - 2.0) * (p - 4.0) * cube * x[d] * rp6);
        }

  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double q = 0.0;
      for (int e = 0; e < 3; ++e) q += dxi(a, e) * dxi(b, e);
      out.g(a, b) = ((a == b) ? 1.0 : 0.0) + dxi(a, b) + dxi(b, a) + q;
    }
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double q = 0.0;
        for (int e = 0; e < 3; ++e)
          q += t2[c](a, e) * dxi(b, e) + dxi(a, e) * t2[c](b, e);
        out.dg[c](a, b) = t2[c](a, b) + t2[c](b, a) + q;
      }
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double q = 0.0;
          for (int e = 0; e < 3; ++e)
            q += t3[d][c](a, e) * dxi(b, e) + t2[c](a, e) * t2[d](b, e) +
                 t2[d](a, e) * t2[c](b, e) + dxi(a, e) * t3[d][c](b, e);
          out.ddg[c][d](a, b) = t3[d][c](a, b) + t3[d][c](b, a) + q;
        }

  // Positivity guard; the small-amplitude precondition should make this moot.
  Eigen::SelfAdjointEigenSolver<Mat3> es(out.g);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw SingularMetricError("perturbed metric lost positivity");
  return out;
}

ExtrinsicJet InitialDataSet::extrinsic_jet(const Vec3& x) const {
  ExtrinsicJet out;
  out.K.setZero();
  for (auto& m : out.dK) m.setZero();
  if (!has_extrinsic()) return out;

  const double r = x.norm();
  if (r < 1e-12) throw DomainError("extrinsic_jet: origin is singular");
  const double e = e_;
  const double re = std::pow(r, -e);
  const double re2 = re / (r * r), re4 = re2 / (r * r);
  auto kr = [](int i, int j) { return i == j ? 1.0 : 0.0; };

  // B_ab = r^-e delta_ab - 3 x_a x_b r^{-e-2}
  Mat3 B;
  std::array<Mat3, 3> dB;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) B(a, b) = re * kr(a, b) - 3.0 * x[a] * x[b] * re2;
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        dB[c](a, b) = -e * x[c] * re2 * kr(a, b) -
                      3.0 * (kr(a, c) * x[b] + kr(b, c) * x[a]) * re2 +
                      3.0 * (e + 2.0) * x[a] * x[b] * x[c] * re4;

  const double rho = 1.0 + kappa_ * x[0] / r;
  Vec3 drho;
  for (int c = 0; c < 3; ++c)
    drho[c] = kappa_ * (kr(0, c) / r - x[0] * x[c] / (r * r * r));

  out.K = a_ * rho * B;
  for (int c = 0; c < 3; ++c) out.dK[c] = a_ * (drho[c] * B + rho * dB[c]);
  return out;
}

CurvatureData curvature(const MetricJet& jet) {
  CurvatureData out;
  Mat3 gi = jet.g.inverse();

  // Gamma^a_{bc}
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int d = 0; d < 3; ++d)
          s += gi(a, d) *
               (jet.dg[b](d, c) + jet.dg[c](d, b) - jet.dg[d](b, c));
        out.gamma[a](b, c) = 0.5 * s;
      }

  // d_e Gamma^a_{bc}; uses d(g^-1) = -g^-1 dg g^-1.
  std::array<Mat3, 3> dgi;
  for (int e = 0; e < 3; ++e) dgi[e] = -gi * jet.dg[e] * gi;
  double dgamma[3][3][3][3];  // [e][a][b][c]
  for (int e = 0; e < 3; ++e)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          double s = 0.0;
          for (int d = 0; d < 3; ++d) {
            s += dgi[e](a, d) *
                 (jet.dg[b](d, c) + jet.dg[c](d, b) - jet.dg[d](b, c));
            s += gi(a, d) *
                 (jet.ddg[e][b](d, c) + jet.ddg[e][c](d, b) - jet.ddg[e][d](b, c));
          }
          dgamma[e][a][b][c] = 0.5 * s;
        }

  // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma Gamma terms.
  double up[3][3][3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double s = dgamma[c][a][d][b] - dgamma[d][a][c][b];
          for (int e = 0; e < 3; ++e)
            s += out.gamma[a](c, e) * out.gamma[e](d, b) -
                 out.gamma[a](d, e) * out.gamma[e](c, b);
          up[a][b][c][d] = s;
        }

  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double s = 0.0;
          for (int e = 0; e < 3; ++e) s += jet.g(a, e) * up[e][b][c][d];
          out.riem[a][b][c][d] = s;
        }

  for (int b = 0; b < 3; ++b)
    for (int d = 0; d < 3; ++d) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a) s += up[a][b][a][d];
      out.ric(b, d) = s;
    }
  out.ric = 0.5 * (out.ric + out.ric.transpose()).eval();
  out.scalar = (gi * out.ric).trace();
  out.einstein = out.ric - 0.5 * out.scalar * jet.g;
  return out;
}

ConstraintData constraints(const InitialDataSet& ids, const Vec3& x) {
  MetricJet mj = ids.metric_jet(x);
  CurvatureData cd = curvature(mj);
  ExtrinsicJet kj = ids.extrinsic_jet(x);
  Mat3 gi = mj.g.inverse();

  double trk = (gi * kj.K).trace();
  Mat3 kup = gi * kj.K * gi;  // K^{ab}
  double k2 = (kup.array() * kj.K.array()).sum();

  ConstraintData out;
  out.mu = 0.5 * (cd.scalar - k2 + trk * trk);

  // J_b = g^{ac} (nabla_a K)_{cb} - d_b tr K
  Vec3 j = Vec3::Zero();
  for (int b = 0; b < 3; ++b) {
    double div = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        double nab = kj.dK[a](c, b);
        for (int e = 0; e < 3; ++e)
          nab -= cd.gamma[e](a, c) * kj.K(e, b) + cd.gamma[e](a, b) * kj.K(c, e);
        div += gi(a, c) * nab;
      }
    double dtr = (gi * kj.dK[b]).trace() - (gi * mj.dg[b] * gi * kj.K).trace();
    j[b] = div - dtr;
  }
  out.j = j;
  out.j_mag = std::sqrt(j.dot(gi * j));
  return out;
}

namespace {

struct SphereNode {
  Vec3 x, nu;   // position, outward unit normal (ambient metric)
  double dmu;   // area element weight
  MetricJet mj;
};

// Geometry of the coordinate sphere |x - center| = R at each grid node.
// Tangents are analytic in (theta, phi); no harmonic transform involved.
std::vector<SphereNode> coordinate_sphere(const InitialDataSet& ids, const Vec3& center,
                                          double R, const SphericalGrid& g,
                                          const Mat3& rot = Mat3::Identity()) {
  std::vector<SphereNode> out(g.size());
  for (int i = 0; i < g.n_theta(); ++i) {
    double th = g.theta(i), ct = std::cos(th), st = std::sin(th);
    for (int j = 0; j < g.n_phi(); ++j) {
      double ph = g.phi(j), cp = std::cos(ph), sp = std::sin(ph);
      Vec3 w = rot * Vec3(st * cp, st * sp, ct);
      Vec3 t1 = R * (rot * Vec3(ct * cp, ct * sp, -st));
      Vec3 t2 = R * (rot * Vec3(-st * sp, st * cp, 0.0));
      SphereNode nd;
      nd.x = center + R * w;
      nd.mj = ids.metric_jet(nd.x);
      double a11 = t1.dot(nd.mj.g * t1), a12 = t1.dot(nd.mj.g * t2),
             a22 = t2.dot(nd.mj.g * t2);
      double det = a11 * a22 - a12 * a12;
      if (det <= 0.0) throw DegenerateImmersionError("coordinate sphere degenerate");
      nd.dmu = std::sqrt(det) / st * g.weight(i, j);
      Vec3 ncov = t1.cross(t2);  // annihilates the tangent plane
      Vec3 nu = nd.mj.g.inverse() * ncov;
      nu /= std::sqrt(nu.dot(nd.mj.g * nu));
      if (nu.dot(w) < 0) nu = -nu;
      nd.nu = nu;
      out[g.index(i, j)] = nd;
    }
  }
  return out;
}

double adm_once(const InitialDataSet& ids, double R, const SphericalGrid& g,
                const Mat3& rot) {
  auto nodes = coordinate_sphere(ids, Vec3::Zero(), R, g, rot);
  double acc = 0.0;
  for (const auto& nd : nodes) {
    CurvatureData cd = curvature(nd.mj);
    acc += nd.nu.dot(cd.einstein * nd.nu) * nd.dmu;
  }
  return -R / (8.0 * kPi) * acc;
}

}  // namespace

AdmEstimate adm_energy(const InitialDataSet& ids, double radius, const SphericalGrid& grid,
                       const Mat3& rotation) {
  if (radius < 2.0 * ids.r_min()) throw DomainError("adm_energy: radius below 2*r_min");
  AdmEstimate out;
  out.value = adm_once(ids, radius, grid, rotation);
  out.refined = adm_once(
      ids, radius, SphericalGrid::build(2 * grid.n_theta(), 2 * grid.n_phi()), rotation);
  out.underresolved =
      std::abs(out.refined - out.value) > 1e-6 * std::max(1.0, std::abs(out.refined));
  return out;
}

AdmEstimate adm_energy(const InitialDataSet& ids, double radius, int n_theta, int n_phi) {
  return adm_energy(ids, radius, SphericalGrid::build(n_theta, n_phi));
}

namespace {

// Sample directions for sup-norm decay probes: axes, face and body diagonals.
std::vector<Vec3> probe_directions() {
  std::vector<Vec3> d;
  for (int a = 0; a < 3; ++a)
    for (double s : {1.0, -1.0}) {
      Vec3 v = Vec3::Zero();
      v[a] = s;
      d.push_back(v);
    }
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) d.push_back(Vec3(sx, sy, sz).normalized());
  d.push_back(Vec3(2.0, 1.0, 0.5).normalized());
  d.push_back(Vec3(-0.3, 1.7, 0.9).normalized());
  return d;
}

double fit_slope(const std::vector<double>& r, const std::vector<double>& v) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < r.size(); ++i) {
    if (v[i] <= 0.0) continue;
    double X = std::log(r[i]), Y = std::log(v[i]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

DecayReport decay_report(const InitialDataSet& ids, std::vector<double> radii) {
  if (radii.empty()) radii = {8, 16, 32, 64, 128, 256};
  if (radii.size() < 3) throw InsufficientDataError("decay_report: need >= 3 radii");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 2.0 * ids.r_min())
      throw DomainError("decay_report: radius below 2*r_min");
    if (i > 0 && radii[i] <= radii[i - 1])
      throw ConfigError("decay_report: radii must be increasing");
  }
  DecayReport rep;
  rep.radii = radii;
  auto dirs = probe_directions();

  const int kQuant = 7;
  std::vector<std::vector<double>> sup(kQuant, std::vector<double>(radii.size(), 0.0));
  for (size_t ir = 0; ir < radii.size(); ++ir) {
    double r = radii[ir];
    for (const auto& w : dirs) {
      Vec3 x = r * w;
      MetricJet mj = ids.metric_jet(x);
      ExtrinsicJet kj = ids.extrinsic_jet(x);
      CurvatureData cd = curvature(mj);
      ConstraintData cn = constraints(ids, x);
      double dgmax = 0.0, ddgmax = 0.0, dkmax = 0.0;
      for (int c = 0; c < 3; ++c) {
        dgmax = std::max(dgmax, mj.dg[c].cwiseAbs().maxCoeff());
        dkmax = std::max(dkmax, kj.dK[c].cwiseAbs().maxCoeff());
        for (int d = 0; d < 3; ++d)
          ddgmax = std::max(ddgmax, mj.ddg[c][d].cwiseAbs().maxCoeff());
      }
      auto& s = sup;
      s[0][ir] = std::max(s[0][ir], (mj.g - Mat3::Identity()).cwiseAbs().maxCoeff());
      s[1][ir] = std::max(s[1][ir], r * dgmax);
      s[2][ir] = std::max(s[2][ir], r * r * ddgmax);
      s[3][ir] = std::max(s[3][ir], kj.K.cwiseAbs().maxCoeff());
      s[4][ir] = std::max(s[4][ir], r * dkmax);
      s[5][ir] = std::max(s[5][ir], std::abs(cn.mu) + cn.j_mag);
      s[6][ir] = std::max(s[6][ir], std::abs(cd.scalar));
    }
  }

  const double dl = ids.delta();
  // The built-in extrinsic family a r^{-e}(I - 3 w w^T) induces a momentum
  // density of order r^{-e-1}; the report compares against that analytic
  // exponent instead of the generic -3-delta when such a tensor is present.
  double mu_j_expected = -3.0 - dl;
  if (ids.has_extrinsic() && ids.k_decay() < 3.0)
    mu_j_expected = -(ids.k_decay() + 1.0);
  const char* names[kQuant] = {"metric_deviation", "metric_d1", "metric_d2", "extrinsic",
                               "extrinsic_d1",     "mu_plus_j", "scalar_curvature"};
  double expected[kQuant] = {-0.5 - dl,     -0.5 - dl, -0.5 - dl, -1.5 - dl,
                             -1.5 - dl,     mu_j_expected, -3.0 - dl};
  const double tol = 0.3;  // slack on fitted exponents
  rep.pass = true;
  for (int qn = 0; qn < kQuant; ++qn) {
    DecayRow row;
    row.name = names[qn];
    row.expected = expected[qn];
    double top = *std::max_element(sup[qn].begin(), sup[qn].end());
    row.vacuous = top < 1e-13;
    row.measured =
        row.vacuous ? std::numeric_limits<double>::quiet_NaN() : fit_slope(radii, sup[qn]);
    row.ok = row.vacuous || row.measured <= row.expected + tol;
    rep.pass = rep.pass && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace stmc
