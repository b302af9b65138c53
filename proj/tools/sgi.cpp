// Command-line front end: scenario simulation, sweeps, closure search,
// spin-safety checks, and figure-style reproduction presets.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgi/contrast.hpp"
#include "sgi/scenario.hpp"
#include "sgi/spin_levels.hpp"

namespace {

using namespace sgi;

std::vector<double> make_grid(const std::vector<double>& list, double lo,
                              double hi, int points, bool log_spaced) {
  if (!list.empty()) return list;
  if (points < 2 || !(hi > lo))
    throw ConfigError({"sweep grid: need --grid or --grid-min/--grid-max with "
                       "--grid-points >= 2"});
  std::vector<double> g;
  g.reserve(std::size_t(points));
  for (int i = 0; i < points; ++i) {
    const double f = double(i) / (points - 1);
    g.push_back(log_spaced ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
  }
  return g;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw NumericalError("cannot write " + path);
  f << text;
}

int cmd_simulate(const std::string& config_path, const std::string& csv,
                 const std::string& report, int stride) {
  auto cfg = ScenarioConfig::from_file(config_path);
  if (!csv.empty()) cfg.outputs.trajectory_csv = csv;
  if (!report.empty()) cfg.outputs.report_json = report;
  if (stride > 0) cfg.outputs.sample_stride = stride;
  const auto result = run_scenario(cfg);
  emit_outputs(result, result.config.outputs);
  std::cout << report_json_text(result);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<double>& grid_list, double lo, double hi,
              int points, bool log_spaced, bool serial,
              const std::string& out) {
  const auto cfg = ScenarioConfig::from_file(config_path);
  const auto axis = sweep_axis_from_string(axis_name);
  const auto grid = make_grid(grid_list, lo, hi, points, log_spaced);
  const auto rows = run_sweep(cfg, axis, grid, !serial);
  const auto csv = sweep_csv(rows, axis);
  if (!out.empty())
    write_file(out, csv);
  else
    std::cout << csv;
  return 0;
}

int cmd_close(const std::string& config_path) {
  const auto cfg = ScenarioConfig::from_file(config_path);
  const auto res = close_interferometer(cfg.constants, cfg.particle,
                                        cfg.protocol, cfg.arms());
  std::printf("tau3_s %.10g\ntau4_s %.10g\nresidual_z_m %.3e\n"
              "residual_p_kg_m_s %.3e\niterations %d\n",
              res.protocol.tau3, res.protocol.tau4, res.residual_z,
              res.residual_p, res.iterations);
  return 0;
}

int cmd_spin_check(const std::string& config_path, double window_us) {
  const auto cfg = ScenarioConfig::from_file(config_path);
  const auto& c = cfg.constants;
  for (double B : {cfg.protocol.B0, cfg.protocol.B1}) {
    const auto p = SpinHamiltonianParams::from_physical(
        c, B, cfg.rotation.theta0, cfg.rotation.omega0);
    const double margin = off_resonance_margin(p);
    std::printf("B_tesla %.6g  Delta_plus_J %.6g  Delta_minus_J %.6g  "
                "W_J %.6g  margin %.6g  %s\n",
                B, p.Delta_plus, p.Delta_minus, p.W, margin,
                off_resonance_pass(p) ? "PASS" : "FAIL");
    if (p.W > 0.0) {
      SpinAmplitudes init;
      init.c_minus = 1.0;
      const auto ev = evolve_spin(c, init, p, window_us * 1e-6, 2000);
      std::printf("  max_transfer %.3e  perturbative_bound %.3e  "
                  "norm_drift %.3e\n",
                  ev.max_transfer, perturbative_transfer_bound(p),
                  ev.max_norm_drift);
    }
  }
  const double ratio = edh_ratio(c, cfg.rotation.omega0, cfg.protocol.B1);
  std::printf("edh_ratio_at_B1 %.3e\n", ratio);
  return 0;
}

int cmd_reproduce(const std::string& name, const std::string& outdir) {
  const std::string prefix = outdir.empty() ? name : outdir + "/" + name;
  if (name == "fig4") {
    auto anchor_cfg = ScenarioConfig::preset("fig3");
    const auto anchor = run_scenario(anchor_cfg);
    ContrastInputs ci;
    ci.delta_phi = std::abs(anchor.mismatch.delta_phi);
    ci.delta_psi = std::abs(anchor.mismatch.delta_psi);
    ci.B0 = anchor_cfg.protocol.B0;
    ci.theta0 = anchor_cfg.rotation.theta0;
    ci.omega0 = anchor_cfg.rotation.omega0;
    const double hbar = anchor_cfg.constants.hbar;
    const double th0 = anchor_cfg.rotation.theta0;
    const std::vector<ContrastFamily> families = {
        {hbar * std::cos(th0), hbar, 0.0},
        {7 * hbar * std::cos(th0), 7 * hbar, 0.0},
        {hbar * std::cos(th0), hbar, 20.0},
        {7 * hbar * std::cos(th0), 7 * hbar, 20.0}};
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i)
      grid.push_back(units::hz_to_rad_s(5e3) *
                     std::pow(20.0, double(i) / 39.0));
    const auto curve = contrast_vs_omega0_curve(
        anchor_cfg.constants, anchor_cfg.particle, ci, grid, families);
    std::ostringstream os;
    os << "omega0_rad_s,omega0_hz,delta_phi_rad,C_dp1_n0,C_dp7_n0,"
          "C_dp1_n20,C_dp7_n20\n";
    for (const auto& pt : curve) {
      os.precision(12);
      os << pt.omega0_rad_s << ',' << pt.omega0_hz << ',' << pt.delta_phi;
      for (double v : pt.contrast) os << ',' << v;
      os << '\n';
    }
    write_file(prefix + "_curve.csv", os.str());
    std::cout << "wrote " << prefix << "_curve.csv\n";
    return 0;
  }
  auto cfg = ScenarioConfig::preset(name);
  cfg.outputs.trajectory_csv = prefix + "_trajectory.csv";
  cfg.outputs.report_json = prefix + "_report.json";
  const auto result = run_scenario(cfg);
  emit_outputs(result, result.config.outputs);
  std::cout << "wrote " << cfg.outputs.trajectory_csv << " and "
            << cfg.outputs.report_json << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const auto cfg = ScenarioConfig::from_file(config_path);
  const auto regime = validate_regime(cfg.constants, cfg.particle,
                                      cfg.rotation, cfg.protocol.B0);
  std::printf("config OK\nomega_low_rad_s %.6g\nomega_larmor_rad_s %.6g\n"
              "regime %s\n",
              regime.omega_low, regime.omega_larmor,
              regime.pass() ? "PASS" : "FAIL (flags only; run proceeds)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stern-Gerlach interferometer simulator for a levitated "
               "rotating nanodiamond"};
  app.require_subcommand(1);

  std::string config_path, csv_out, report_out, axis = "omega0", sweep_out;
  std::string preset_name, outdir;
  std::vector<double> grid_list;
  double grid_min = 0.0, grid_max = 0.0, window_us = 10.0;
  int grid_points = 0, stride = 0;
  bool log_spaced = false, serial = false;

  auto* sim = app.add_subcommand("simulate", "run one scenario");
  sim->add_option("config", config_path)->required();
  sim->add_option("--trajectory-csv", csv_out);
  sim->add_option("--report-json", report_out);
  sim->add_option("--stride", stride);

  auto* sweep = app.add_subcommand("sweep", "parameter sweep");
  sweep->add_option("config", config_path)->required();
  sweep->add_option("--axis", axis, "omega0 | dp | n | mass");
  sweep->add_option("--grid", grid_list)->delimiter(',');
  sweep->add_option("--grid-min", grid_min);
  sweep->add_option("--grid-max", grid_max);
  sweep->add_option("--grid-points", grid_points);
  sweep->add_flag("--log", log_spaced, "log-spaced grid");
  sweep->add_flag("--serial", serial, "disable the worker pool");
  sweep->add_option("--out", sweep_out);

  auto* close = app.add_subcommand("close", "solve stage times for closure");
  close->add_option("config", config_path)->required();

  auto* spin = app.add_subcommand("spin-check", "three-level safety margins");
  spin->add_option("config", config_path)->required();
  spin->add_option("--window-us", window_us);

  auto* rep = app.add_subcommand("reproduce", "built-in presets");
  rep->add_option("name", preset_name, "fig3 | fig4 | figA1 | figA2 | figA4")
      ->required();
  rep->add_option("--outdir", outdir);

  auto* val = app.add_subcommand("validate", "parse and check a config");
  val->add_option("config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(config_path, csv_out, report_out, stride);
    if (sweep->parsed())
      return cmd_sweep(config_path, axis, grid_list, grid_min, grid_max,
                       grid_points, log_spaced, serial, sweep_out);
    if (close->parsed()) return cmd_close(config_path);
    if (spin->parsed()) return cmd_spin_check(config_path, window_us);
    if (rep->parsed()) return cmd_reproduce(preset_name, outdir);
    if (val->parsed()) return cmd_validate(config_path);
  } catch (const sgi::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const sgi::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const sgi::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 2;
  } catch (const sgi::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
