#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/contrast.hpp"
#include "sgi/field.hpp"
#include "sgi/params.hpp"
#include "sgi/rotational.hpp"
#include "sgi/static_baseline.hpp"
#include "sgi/translational.hpp"

namespace sgi {

enum class Scheme { GyroscopicPm1, Static0m1 };

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int steps_per_period = 50;
  bool field_sign_strict = false;
  double sample_dt = 1e-4;  // s
};

struct OutputConfig {
  std::string trajectory_csv;  // empty = no file
  std::string report_json;     // empty = no file
  int sample_stride = 1;
};

struct ScenarioConfig {
  PhysicalConstants constants;
  ParticleParams particle;
  FieldProtocol protocol;
  RotationInit rotation;
  QuantumInit quantum;
  Scheme scheme = Scheme::GyroscopicPm1;
  bool auto_close = false;
  IntegratorConfig integrator;
  OutputConfig outputs;

  std::pair<SpinBranch, SpinBranch> arms() const {
    return scheme == Scheme::GyroscopicPm1 ? SpinBranch::pm_pair()
                                           : SpinBranch::zm_pair();
  }

  /// Parses and validates a JSON document. Throws ConfigError listing every
  /// violation (unknown key, missing section, bad value), not just the first.
  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig from_file(const std::string& path);

  /// Built-in presets: fig3, fig4, figA1, figA2, figA4.
  static ScenarioConfig preset(const std::string& name);

  /// Canonical serialized form used for the provenance hash.
  std::string canonical_json() const;
};

/// Uniform-grid trajectory of both arms (column layout depends on scheme).
struct TrajectoryTable {
  std::vector<double> t;
  std::vector<double> z_L, z_R, pz_L, pz_R;
  std::vector<double> theta_L, theta_R;
  // gyroscopic scheme
  std::vector<double> theta_bar_L, theta_bar_R;
  std::vector<double> phi_L, phi_R, psi_L, psi_R;
  // static scheme
  std::vector<double> theta_dot_L, theta_dot_R;
  std::vector<double> sigma_L, sigma_R;
  std::vector<double> contrast_gaussian;
};

struct StaticSummary {
  double sigma0 = 0.0;           // rad, ground-state width at t = 0
  double sigma_L_tau4 = 0.0;     // rad
  double sigma_R_tau4 = 0.0;     // rad
  double lambda_theta = 0.0;     // rad, hbar / dp_theta
  double lambda_p = 0.0;         // J s, hbar / dtheta
  double gaussian_contrast_tau4 = 0.0;
  double semiclassical_contrast = 0.0;
  double peak_frequency = 0.0;       // rad/s, contrast-peak recurrence
  double two_omega_tau4 = 0.0;       // rad/s, 2 w(tau4) prediction
  double libration_omega_tau4 = 0.0; // rad/s
};

struct Provenance {
  std::string config_hash;  // FNV-1a of the canonical config
  double wall_time_s = 0.0;
  IntegratorConfig integrator;
};

struct RunResult {
  ScenarioConfig config;  // protocol holds the closed times when auto_close
  RegimeReport regime;
  std::optional<ClosureResult> closure;
  TrajectoryTable trajectory;
  MismatchReport mismatch;
  ContrastReport contrast;             // gyroscopic scheme
  std::optional<StaticSummary> static_summary;
  double max_separation = 0.0;         // max |z_L - z_R|, m
  double lin_vs_full_max_dtheta = 0.0; // gyroscopic diagnostic, rad
  Provenance provenance;
};

RunResult run_scenario(const ScenarioConfig& config);

enum class SweepAxis { Omega0, Dp, N, Mass };
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  double delta_phi = 0.0;
  double delta_theta = 0.0;
  double contrast_zero_T = 0.0;
  double contrast_thermal = 0.0;
  bool regime_pass = false;
};

/// One run_scenario per grid point, axis value substituted into the config.
/// Points run independently (OpenMP when parallel=true); the merged table is
/// identical either way. Per-point failures land in the row's error field.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, SweepAxis axis,
                                const std::vector<double>& grid,
                                bool parallel = true);

/// Writes the trajectory CSV and/or report JSON per the outputs section.
void emit_outputs(const RunResult& result, const OutputConfig& outputs);

std::string trajectory_csv(const RunResult& result, int stride = 1);
std::string report_json_text(const RunResult& result);
std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis);

/// FNV-1a 64-bit hex digest.
std::string fnv1a_hex(const std::string& data);

}  // namespace sgi
