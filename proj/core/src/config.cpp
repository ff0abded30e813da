#include "stmc/config.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stmc/errors.hpp"

namespace stmc {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::run_flow: return "run-flow";
    case ExperimentKind::check_ambient: return "check-ambient";
    case ExperimentKind::spectral_report: return "spectral-report";
    case ExperimentKind::foliate: return "foliate";
    case ExperimentKind::identity_suite: return "identity-suite";
  }
  return "?";
}

InitialDataSet RunConfig::make_ambient() const {
  if (ambient_kind == "euclidean") return InitialDataSet::euclidean();
  if (ambient_kind == "schwarzschild") return InitialDataSet::schwarzschild(m);
  if (ambient_kind == "schwarzschild_k")
    return InitialDataSet::schwarzschild_k(m, a, e, kappa);
  if (ambient_kind == "perturbed")
    return InitialDataSet::perturbed(seed, amplitude, delta);
  throw ConfigError("unknown ambient kind '" + ambient_kind + "'");
}

GraphSurface RunConfig::make_surface(const SphericalGrid& grid) const {
  GraphSurface s = GraphSurface::sphere(grid, center, sigma);
  if (shape == "ellipsoid") {
    for (int i = 0; i < grid.n_theta(); ++i)
      for (int j = 0; j < grid.n_phi(); ++j) {
        int k = grid.index(i, j);
        double st = grid.sin_theta()[k], ct = grid.cos_theta()[k];
        double wx = st * std::cos(grid.phi(j)), wy = st * std::sin(grid.phi(j));
        double inv = std::sqrt(wx * wx / (axis_a * axis_a) +
                               wy * wy / (axis_b * axis_b) + ct * ct / (axis_c * axis_c));
        s.rho[k] = sigma / inv;
      }
  }
  if (perturb_amp != 0.0) {
    Field y = real_harmonic(grid, perturb_l, perturb_m);
    s.rho *= (1.0 + perturb_amp * y / y.abs().maxCoeff());
  }
  return s;
}

std::string RunConfig::echo_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(experiment);
  j["ambient"] = {{"kind", ambient_kind}, {"m", m},       {"a", a},
                  {"e", e},               {"kappa", kappa}, {"seed", seed},
                  {"amplitude", amplitude}, {"delta", delta}};
  j["grid"] = {{"n_theta", n_theta}, {"n_phi", n_phi}};
  j["surface"] = {{"sigma", sigma},
                  {"center", {center[0], center[1], center[2]}},
                  {"shape", shape},
                  {"axes", {axis_a, axis_b, axis_c}},
                  {"perturb", {perturb_l, perturb_m, perturb_amp}}};
  j["flow"] = {{"q", flow.q},
               {"cfl", flow.cfl},
               {"t_max", flow.t_max},
               {"stop_tol", flow.stop_tol},
               {"report_every", flow.report_every},
               {"recentering", flow.recentering},
               {"max_steps", flow.max_steps},
               {"pre_flow", pre_flow}};
  j["spectral"] = {{"k", k_eigs}};
  j["foliate"] = {{"sigmas", sigmas}};
  j["roundness"] = {{"eta", eta}, {"b1", b1}, {"b2", b2}};
  j["output"] = {{"dir", output_dir}};
  return j.dump(2);
}

namespace {

struct KV {
  std::map<std::string, std::string> vals;  // "section.key" -> value
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

KV tokenize(const std::string& text, std::vector<std::string>& errs) {
  KV kv;
  std::istringstream in(text);
  std::string line, section;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.push_back("line " + std::to_string(ln) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(ln) + ": expected key=value");
      continue;
    }
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (section.empty()) {
      errs.push_back("line " + std::to_string(ln) + ": key '" + key +
                     "' outside any section");
      continue;
    }
    kv.vals[section + "." + key] = val;
  }
  return kv;
}

class Reader {
 public:
  Reader(KV kv, std::vector<std::string>& errs) : kv_(std::move(kv)), errs_(errs) {}

  bool has(const std::string& k) const { return kv_.vals.count(k) > 0; }

  std::string str(const std::string& k, const std::string& dflt) {
    seen_.insert(k);
    auto it = kv_.vals.find(k);
    return it == kv_.vals.end() ? dflt : it->second;
  }
  double num(const std::string& k, double dflt) {
    seen_.insert(k);
    auto it = kv_.vals.find(k);
    if (it == kv_.vals.end()) return dflt;
    try {
      size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      errs_.push_back("'" + k + "': not a number: '" + it->second + "'");
      return dflt;
    }
  }
  long integer(const std::string& k, long dflt) {
    double v = num(k, (double)dflt);
    if (v != std::floor(v)) errs_.push_back("'" + k + "': expected an integer");
    return (long)v;
  }
  bool flag(const std::string& k, bool dflt) {
    std::string v = str(k, dflt ? "true" : "false");
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    errs_.push_back("'" + k + "': expected true/false");
    return dflt;
  }
  std::vector<double> list(const std::string& k, std::vector<double> dflt) {
    seen_.insert(k);
    auto it = kv_.vals.find(k);
    if (it == kv_.vals.end()) return dflt;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(trim(item)));
      } catch (...) {
        errs_.push_back("'" + k + "': bad list element '" + item + "'");
      }
    }
    return out;
  }
  void check_unknown() {
    for (const auto& [k, v] : kv_.vals)
      if (!seen_.count(k)) errs_.push_back("unknown key '" + k + "'");
  }

 private:
  KV kv_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides) {
  std::vector<std::string> errs;
  KV kv = tokenize(text, errs);
  for (const auto& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos || ov.find('.') == std::string::npos ||
        ov.find('.') > eq) {
      errs.push_back("override '" + ov + "': expected section.key=value");
      continue;
    }
    kv.vals[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
  }

  Reader r(std::move(kv), errs);
  RunConfig c;

  std::string ek = r.str("experiment.kind", "");
  if (ek == "run-flow")
    c.experiment = ExperimentKind::run_flow;
  else if (ek == "check-ambient")
    c.experiment = ExperimentKind::check_ambient;
  else if (ek == "spectral-report")
    c.experiment = ExperimentKind::spectral_report;
  else if (ek == "foliate")
    c.experiment = ExperimentKind::foliate;
  else if (ek == "identity-suite")
    c.experiment = ExperimentKind::identity_suite;
  else
    errs.push_back("'experiment.kind': must be one of run-flow, check-ambient, "
                   "spectral-report, foliate, identity-suite (got '" + ek + "')");

  c.ambient_kind = r.str("ambient.kind", "");
  if (c.ambient_kind != "euclidean" && c.ambient_kind != "schwarzschild" &&
      c.ambient_kind != "schwarzschild_k" && c.ambient_kind != "perturbed")
    errs.push_back("'ambient.kind': must be one of euclidean, schwarzschild, "
                   "schwarzschild_k, perturbed (got '" + c.ambient_kind + "')");
  c.m = r.num("ambient.m", c.m);
  c.a = r.num("ambient.a", c.a);
  c.e = r.num("ambient.e", c.e);
  c.kappa = r.num("ambient.kappa", c.kappa);
  c.seed = (std::uint64_t)r.integer("ambient.seed", (long)c.seed);
  c.amplitude = r.num("ambient.amplitude", c.amplitude);
  c.delta = r.num("ambient.delta", c.delta);
  if (c.delta <= 0.0 || c.delta > 0.5)
    errs.push_back("'ambient.delta': delta in (0, 1/2] required");
  if ((c.ambient_kind == "schwarzschild" || c.ambient_kind == "schwarzschild_k") &&
      c.m <= 0.0)
    errs.push_back("'ambient.m': positive mass required for Schwarzschild kinds");
  if (c.ambient_kind == "schwarzschild_k" && c.e < 1.5 + c.delta - 1e-12)
    errs.push_back("'ambient.e': decay exponent >= 3/2 + delta required");

  c.n_theta = (int)r.integer("grid.n_theta", c.n_theta);
  c.n_phi = (int)r.integer("grid.n_phi", c.n_phi);
  if (c.n_theta < 8) errs.push_back("'grid.n_theta': >= 8 required");
  if (c.n_phi < 16 || c.n_phi % 2 != 0) errs.push_back("'grid.n_phi': even, >= 16 required");

  c.sigma = r.num("surface.sigma", c.sigma);
  if (c.sigma <= 0.0) errs.push_back("'surface.sigma': positive radius required");
  c.center = Vec3(r.num("surface.center_x", 0.0), r.num("surface.center_y", 0.0),
                  r.num("surface.center_z", 0.0));
  c.shape = r.str("surface.shape", c.shape);
  if (c.shape != "sphere" && c.shape != "ellipsoid")
    errs.push_back("'surface.shape': must be sphere or ellipsoid");
  c.axis_a = r.num("surface.axis_a", c.axis_a);
  c.axis_b = r.num("surface.axis_b", c.axis_b);
  c.axis_c = r.num("surface.axis_c", c.axis_c);
  if (c.axis_a <= 0 || c.axis_b <= 0 || c.axis_c <= 0)
    errs.push_back("'surface.axis_*': positive axes required");
  c.perturb_l = (int)r.integer("surface.perturb_l", 0);
  c.perturb_m = (int)r.integer("surface.perturb_m", 0);
  c.perturb_amp = r.num("surface.perturb_amp", 0.0);
  if (std::abs(c.perturb_m) > c.perturb_l)
    errs.push_back("'surface.perturb_m': |m| <= l required");
  if (std::abs(c.perturb_amp) >= 0.5)
    errs.push_back("'surface.perturb_amp': |amplitude| < 0.5 required");

  c.flow.q = r.num("flow.q", c.flow.q);
  if (c.flow.q < 2.0) errs.push_back("'flow.q': q >= 2 required");
  c.flow.cfl = r.num("flow.cfl", c.flow.cfl);
  if (c.flow.cfl <= 0.0 || c.flow.cfl > 1.0)
    errs.push_back("'flow.cfl': cfl in (0, 1] required");
  c.flow.t_max = r.num("flow.t_max", c.flow.t_max);
  c.flow.stop_tol = r.num("flow.stop_tol", c.flow.stop_tol);
  if (c.flow.stop_tol <= 0.0) errs.push_back("'flow.stop_tol': positive required");
  c.flow.report_every = (int)r.integer("flow.report_every", c.flow.report_every);
  if (c.flow.report_every < 1) errs.push_back("'flow.report_every': >= 1 required");
  c.flow.recentering = r.flag("flow.recentering", c.flow.recentering);
  c.flow.max_steps = r.integer("flow.max_steps", c.flow.max_steps);
  c.pre_flow = r.flag("flow.pre_flow", c.pre_flow);

  c.k_eigs = (int)r.integer("spectral.k", c.k_eigs);
  if (c.k_eigs < 4) errs.push_back("'spectral.k': >= 4 required");

  c.sigmas = r.list("foliate.sigmas", c.sigmas);
  if (c.experiment == ExperimentKind::foliate) {
    if (c.sigmas.size() < 3) errs.push_back("'foliate.sigmas': >= 3 entries required");
    for (size_t i = 1; i < c.sigmas.size(); ++i)
      if (c.sigmas[i] <= c.sigmas[i - 1]) {
        errs.push_back("'foliate.sigmas': strictly increasing required");
        break;
      }
  }

  c.eta = r.num("roundness.eta", c.eta);
  c.b1 = r.num("roundness.b1", c.b1);
  c.b2 = r.num("roundness.b2", c.b2);
  c.output_dir = r.str("output.dir", c.output_dir);

  r.check_unknown();
  if (!errs.empty()) {
    std::string msg = "configuration invalid:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

}  // namespace stmc
