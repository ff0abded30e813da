#pragma once

#include <string>
#include <vector>

#include "stmc/ambient.hpp"
#include "stmc/flow.hpp"

namespace stmc {

inline constexpr const char* kCodeVersion = "stmc 1.0.0";
inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { run_flow, check_ambient, spectral_report, foliate,
                            identity_suite };

std::string to_string(ExperimentKind k);

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::run_flow;

  // ambient
  std::string ambient_kind;  // euclidean | schwarzschild | schwarzschild_k | perturbed
  double m = 1.0;
  double a = 0.1;
  double e = 2.0;
  double kappa = 0.0;
  std::uint64_t seed = 1;
  double amplitude = 0.01;
  double delta = 0.5;

  // grid
  int n_theta = 24;
  int n_phi = 48;

  // initial surface
  double sigma = 10.0;
  Vec3 center = Vec3::Zero();
  std::string shape = "sphere";  // sphere | ellipsoid
  double axis_a = 1.0, axis_b = 1.0, axis_c = 1.2;
  int perturb_l = 0, perturb_m = 0;
  double perturb_amp = 0.0;

  // flow
  FlowConfig flow;
  bool pre_flow = false;

  // spectral
  int k_eigs = 12;

  // foliate
  std::vector<double> sigmas = {20.0, 40.0, 80.0};

  // roundness knobs
  double eta = 1.0, b1 = 10.0, b2 = 10.0;

  std::string output_dir = "out";

  InitialDataSet make_ambient() const;
  GraphSurface make_surface(const SphericalGrid& grid) const;
  // Canonical echo of every field, used for the manifest hash.
  std::string echo_json() const;
};

// Parses the sectioned key=value format ('#' comments), applies overrides of
// the form "section.key=value", validates everything, and either returns the
// config or throws ConfigError listing all violations.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides = {});

// Runs the configured experiment, writing artifacts into output_dir.
// Returns 0 on success, 3 on numeric failure, 4 on non-convergence.
int execute(const RunConfig& cfg);

}  // namespace stmc
