#include "sgi/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sgi {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// config parsing

namespace {

class SectionReader {
 public:
  SectionReader(const json& j, std::string path, std::vector<std::string>& errs)
      : j_(j), path_(std::move(path)), errs_(errs) {}

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, bool required,
                double fallback = 0.0) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) errs_.push_back(path_ + ": missing key '" + key + "'");
      return fallback;
    }
    if (!j_[key].is_number()) {
      errs_.push_back(path_ + "." + key + ": expected a number");
      return fallback;
    }
    return j_[key].get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_boolean()) {
      errs_.push_back(path_ + "." + key + ": expected a boolean");
      return fallback;
    }
    return j_[key].get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_string()) {
      errs_.push_back(path_ + "." + key + ": expected a string");
      return fallback;
    }
    return j_[key].get<std::string>();
  }

  /// Exactly one of two unit-suffixed spellings; `scale_a` converts the first
  /// to SI, `scale_b` the second.
  double either(const std::string& key_a, double scale_a,
                const std::string& key_b, double scale_b, bool required) {
    seen_.insert(key_a);
    seen_.insert(key_b);
    const bool ha = j_.contains(key_a), hb = j_.contains(key_b);
    if (ha && hb) {
      errs_.push_back(path_ + ": give only one of '" + key_a + "' / '" +
                      key_b + "'");
      return 0.0;
    }
    if (!ha && !hb) {
      if (required)
        errs_.push_back(path_ + ": missing key '" + key_a + "' (or '" +
                        key_b + "')");
      return 0.0;
    }
    const std::string& key = ha ? key_a : key_b;
    if (!j_[key].is_number()) {
      errs_.push_back(path_ + "." + key + ": expected a number");
      return 0.0;
    }
    return j_[key].get<double>() * (ha ? scale_a : scale_b);
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        errs_.push_back(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

const json* section(const json& root, const std::string& key,
                    std::vector<std::string>& errs, bool required = true) {
  if (!root.contains(key)) {
    if (required) errs.push_back("missing section '" + key + "'");
    return nullptr;
  }
  if (!root[key].is_object()) {
    errs.push_back("section '" + key + "' must be an object");
    return nullptr;
  }
  return &root[key];
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  std::vector<std::string> errs;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse failure: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"top level must be an object"});

  ScenarioConfig cfg;
  std::set<std::string> top_seen;

  top_seen.insert("scheme");
  if (!root.contains("scheme")) {
    errs.push_back("missing key 'scheme'");
  } else {
    const std::string s =
        root["scheme"].is_string() ? root["scheme"].get<std::string>() : "";
    if (s == "gyroscopic_pm1")
      cfg.scheme = Scheme::GyroscopicPm1;
    else if (s == "static_0m1")
      cfg.scheme = Scheme::Static0m1;
    else
      errs.push_back("scheme: expected 'gyroscopic_pm1' or 'static_0m1'");
  }

  top_seen.insert("particle");
  if (const json* p = section(root, "particle", errs)) {
    SectionReader r(*p, "particle", errs);
    cfg.particle.mass = r.number("mass_kg", true);
    cfg.particle.density = r.number("density_kg_m3", false, 3500.0);
    cfg.particle.inertia = r.number("inertia_kg_m2", false, 0.0);
    cfg.particle.nv_offset_d =
        r.either("nv_offset_d_nm", units::m_per_nm, "nv_offset_d_m", 1.0, false);
    cfg.particle.nv_angle_alpha = r.number("nv_angle_alpha_rad", false, 0.0);
    r.finish();
  }

  top_seen.insert("field");
  if (const json* f = section(root, "field", errs)) {
    SectionReader r(*f, "field", errs);
    cfg.protocol.B0 =
        r.either("B0_gauss", units::tesla_per_gauss, "B0_tesla", 1.0, true);
    cfg.protocol.B1 =
        r.either("B1_gauss", units::tesla_per_gauss, "B1_tesla", 1.0, true);
    cfg.protocol.eta =
        r.either("eta_gauss_per_um", units::tesla_per_m_per_gauss_per_um,
                 "eta_tesla_per_m", 1.0, true);
    r.finish();
  }

  top_seen.insert("protocol");
  if (const json* p = section(root, "protocol", errs)) {
    SectionReader r(*p, "protocol", errs);
    cfg.protocol.tau1 = r.number("tau1_s", true);
    cfg.protocol.tau2 = r.number("tau2_s", true);
    cfg.protocol.tau3 = r.number("tau3_s", true);
    cfg.protocol.tau4 = r.number("tau4_s", true);
    cfg.auto_close = r.boolean("auto_close", false);
    r.finish();
  }

  top_seen.insert("rotation");
  if (const json* p = section(root, "rotation", errs)) {
    SectionReader r(*p, "rotation", errs);
    cfg.rotation.omega0 =
        r.either("omega0_hz", units::two_pi, "omega0_rad_s", 1.0, true);
    cfg.rotation.theta0 = r.number("theta0_rad", false, 0.0);
    r.finish();
  }

  top_seen.insert("quantum");
  if (const json* p = section(root, "quantum", errs, false)) {
    SectionReader r(*p, "quantum", errs);
    const double hbar = cfg.constants.hbar;
    const double dp_psi = r.number("dp_psi_hbar", false, 1.0) * hbar;
    const double n = r.number("occupation_n", false, 0.0);
    cfg.quantum = QuantumInit::from_dp_psi(dp_psi, cfg.rotation.theta0, n);
    if (r.has("dp_phi_hbar"))
      cfg.quantum.dp_phi = r.number("dp_phi_hbar", false, 1.0) * hbar;
    else
      r.number("dp_phi_hbar", false, 0.0);  // mark as known
    r.finish();
  } else if (!root.contains("quantum")) {
    cfg.quantum =
        QuantumInit::from_dp_psi(cfg.constants.hbar, cfg.rotation.theta0, 0.0);
  }

  top_seen.insert("integrator");
  if (const json* p = section(root, "integrator", errs, false)) {
    SectionReader r(*p, "integrator", errs);
    cfg.integrator.rel_tol = r.number("rel_tol", false, 1e-9);
    cfg.integrator.abs_tol = r.number("abs_tol", false, 1e-12);
    cfg.integrator.steps_per_period =
        int(r.number("steps_per_period", false, 50));
    cfg.integrator.field_sign_strict = r.boolean("field_sign_strict", false);
    cfg.integrator.sample_dt = r.number("sample_dt_s", false, 1e-4);
    r.finish();
  }

  top_seen.insert("outputs");
  if (const json* p = section(root, "outputs", errs, false)) {
    SectionReader r(*p, "outputs", errs);
    cfg.outputs.trajectory_csv = r.text("trajectory_csv", "");
    cfg.outputs.report_json = r.text("report_json", "");
    cfg.outputs.sample_stride = int(r.number("sample_stride", false, 1));
    r.finish();
  }

  for (auto it = root.begin(); it != root.end(); ++it)
    if (!top_seen.count(it.key()))
      errs.push_back("unknown top-level key '" + it.key() + "'");

  // record-level validation, every violation collected
  auto collect = [&](auto&& fn, const char* what) {
    try {
      fn();
    } catch (const std::exception& e) {
      errs.push_back(std::string(what) + ": " + e.what());
    }
  };
  if (errs.empty()) {
    collect([&] { cfg.constants.validate(); }, "constants");
    collect([&] { cfg.particle.validate(); }, "particle");
    collect([&] { cfg.protocol.validate(); }, "protocol");
    collect([&] { cfg.rotation.validate(); }, "rotation");
    collect([&] { cfg.quantum.validate(); }, "quantum");
    if (cfg.integrator.rel_tol <= 0.0 || cfg.integrator.abs_tol <= 0.0)
      errs.push_back("integrator: tolerances must be > 0");
    if (cfg.integrator.steps_per_period < 4)
      errs.push_back("integrator: steps_per_period must be >= 4");
    if (cfg.integrator.sample_dt <= 0.0)
      errs.push_back("integrator: sample_dt_s must be > 0");
    if (cfg.outputs.sample_stride < 1)
      errs.push_back("outputs: sample_stride must be >= 1");
    if (cfg.scheme == Scheme::GyroscopicPm1 && !(cfg.rotation.omega0 > 0.0))
      errs.push_back(
          "rotation: omega0 must be > 0 for the gyroscopic scheme; use "
          "scheme 'static_0m1' for a non-rotating particle");
    if (cfg.scheme == Scheme::Static0m1 && cfg.rotation.omega0 != 0.0)
      errs.push_back("rotation: the static scheme requires omega0 = 0");
  }
  if (!errs.empty()) throw ConfigError(errs);
  return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ScenarioConfig::canonical_json() const {
  json j;
  j["scheme"] =
      scheme == Scheme::GyroscopicPm1 ? "gyroscopic_pm1" : "static_0m1";
  j["particle"] = {{"mass_kg", particle.mass},
                   {"density_kg_m3", particle.density},
                   {"inertia_kg_m2", particle.moment_of_inertia()},
                   {"nv_offset_d_m", particle.nv_offset_d},
                   {"nv_angle_alpha_rad", particle.nv_angle_alpha}};
  j["field"] = {{"B0_tesla", protocol.B0},
                {"B1_tesla", protocol.B1},
                {"eta_tesla_per_m", protocol.eta}};
  j["protocol"] = {{"tau1_s", protocol.tau1},
                   {"tau2_s", protocol.tau2},
                   {"tau3_s", protocol.tau3},
                   {"tau4_s", protocol.tau4},
                   {"auto_close", auto_close}};
  j["rotation"] = {{"omega0_rad_s", rotation.omega0},
                   {"theta0_rad", rotation.theta0}};
  j["quantum"] = {{"dp_phi_J_s", quantum.dp_phi},
                  {"dp_psi_J_s", quantum.dp_psi},
                  {"occupation_n", quantum.occupation_n}};
  j["integrator"] = {{"rel_tol", integrator.rel_tol},
                     {"abs_tol", integrator.abs_tol},
                     {"steps_per_period", integrator.steps_per_period},
                     {"field_sign_strict", integrator.field_sign_strict},
                     {"sample_dt_s", integrator.sample_dt}};
  return j.dump();
}

ScenarioConfig ScenarioConfig::preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.particle.mass = 1e-17;
  cfg.particle.nv_offset_d = 10e-9;
  cfg.particle.nv_angle_alpha = std::numbers::pi / 6.0;
  cfg.protocol.B0 = units::gauss_to_tesla(100.0);
  cfg.protocol.B1 = units::gauss_to_tesla(1.0);
  cfg.protocol.eta = units::gauss_per_um_to_tesla_per_m(0.45);
  cfg.quantum = QuantumInit::from_dp_psi(cfg.constants.hbar, 0.01, 0.0);

  if (name == "fig3" || name == "fig4") {
    cfg.scheme = Scheme::GyroscopicPm1;
    cfg.protocol.tau1 = 0.482;
    cfg.protocol.tau2 = 0.514;
    cfg.protocol.tau3 = 0.8022;
    cfg.protocol.tau4 = 1.320;
    cfg.rotation.omega0 = units::hz_to_rad_s(1e4);
    cfg.rotation.theta0 = 0.01;
    return cfg;
  }
  if (name == "figA1" || name == "figA2" || name == "figA4") {
    cfg.scheme = Scheme::Static0m1;
    cfg.protocol.tau1 = 0.494;
    cfg.protocol.tau2 = 0.513;
    cfg.protocol.tau3 = 0.800;
    cfg.protocol.tau4 = 1.314;
    cfg.rotation.omega0 = 0.0;
    cfg.rotation.theta0 = 0.0;
    cfg.quantum = QuantumInit::from_dp_psi(cfg.constants.hbar, 0.0, 0.0);
    if (name == "figA4") {
      // pure width-dynamics contrast: NV at the centre of mass
      cfg.particle.nv_offset_d = 0.0;
      cfg.particle.nv_angle_alpha = 0.0;
    }
    return cfg;
  }
  throw ConfigError({"unknown preset '" + name +
                     "'; expected fig3, fig4, figA1, figA2 or figA4"});
}

// ---------------------------------------------------------------------------
// pipelines

namespace {

struct LinearSeries {
  const std::vector<double>* t;
  const std::vector<double>* y;
  double operator()(double x) const {
    const auto& tt = *t;
    const auto& yy = *y;
    if (x <= tt.front()) return yy.front();
    if (x >= tt.back()) return yy.back();
    const auto it = std::upper_bound(tt.begin(), tt.end(), x);
    const std::size_t i = std::size_t(it - tt.begin());
    const double f = (x - tt[i - 1]) / (tt[i] - tt[i - 1]);
    return yy[i - 1] + f * (yy[i] - yy[i - 1]);
  }
};

void run_gyroscopic(const ScenarioConfig& cfg, RunResult& out) {
  const auto& c = cfg.constants;
  const auto arms = cfg.arms();
  const auto& proto = out.config.protocol;

  const auto solL = evolve_branch_closed(c, cfg.particle, proto, arms.first);
  const auto solR = evolve_branch_closed(c, cfg.particle, proto, arms.second);

  RotOptions ropt;
  ropt.rel_tol = cfg.integrator.rel_tol;
  ropt.abs_tol = cfg.integrator.abs_tol;
  ropt.steps_per_period = cfg.integrator.steps_per_period;
  ropt.field_sign_strict = cfg.integrator.field_sign_strict;
  ropt.sample_dt = cfg.integrator.sample_dt;

  const auto fullL = integrate_full(c, cfg.particle, proto, arms.first, solL,
                                    cfg.rotation, ropt);
  const auto fullR = integrate_full(c, cfg.particle, proto, arms.second, solR,
                                    cfg.rotation, ropt);
  if (fullL.samples.size() != fullR.samples.size())
    throw NumericalError("run_scenario: arm sample grids diverged");

  const std::size_t n = fullL.samples.size();
  auto& tr = out.trajectory;
  tr.t.reserve(n);
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = fullL.samples[i].t;
    grid.push_back(t);
    tr.t.push_back(t);
    const auto zl = solL.eval(t);
    const auto zr = solR.eval(t);
    tr.z_L.push_back(zl.z);
    tr.z_R.push_back(zr.z);
    tr.pz_L.push_back(zl.p_z);
    tr.pz_R.push_back(zr.p_z);
    tr.theta_L.push_back(fullL.samples[i].theta);
    tr.theta_R.push_back(fullR.samples[i].theta);
    tr.phi_L.push_back(fullL.samples[i].phi);
    tr.phi_R.push_back(fullR.samples[i].phi);
    tr.psi_L.push_back(fullL.samples[i].psi);
    tr.psi_R.push_back(fullR.samples[i].psi);
    out.max_separation = std::max(out.max_separation, std::abs(zl.z - zr.z));
  }
  tr.theta_bar_L = theta_bar_series(c, cfg.particle, proto, arms.first, solL,
                                    cfg.rotation, grid);
  tr.theta_bar_R = theta_bar_series(c, cfg.particle, proto, arms.second, solR,
                                    cfg.rotation, grid);

  // mismatches at closure; delta_phi / delta_psi come from the small-angle
  // dynamics (the route the analysis defines them by), the full Euler-angle
  // difference is kept as a diagnostic
  const auto& fL = fullL.final_state;
  const auto& fR = fullR.final_state;
  out.mismatch.delta_theta_full = fL.theta - fR.theta;
  out.mismatch.delta_phi_full = fL.phi - fR.phi;
  out.mismatch.delta_psi_full = fL.psi - fR.psi;
  out.mismatch.delta_theta_bound = delta_theta_bound(
      c, cfg.particle, proto.B0, cfg.rotation.theta0, cfg.rotation.omega0);
  const auto area = delta_phi_area(grid, tr.theta_bar_L, tr.theta_bar_R,
                                   cfg.rotation.omega0, cfg.rotation.theta0);
  out.mismatch.sigma_A_minus_sigma_B = area.sigma_A - area.sigma_B;
  out.mismatch.delta_phi_area = area.delta_phi;

  const auto linL = integrate_linearized(c, cfg.particle, proto, arms.first,
                                         solL, cfg.rotation, ropt);
  const auto linR = integrate_linearized(c, cfg.particle, proto, arms.second,
                                         solR, cfg.rotation, ropt);
  out.mismatch.delta_phi = linL.final_state.phi - linR.final_state.phi;
  out.mismatch.delta_psi = linL.final_state.psi - linR.final_state.psi;
  out.mismatch.delta_theta = linL.final_state.theta - linR.final_state.theta;
  out.mismatch.delta_p_theta =
      linL.final_state.p_theta - linR.final_state.p_theta;

  // validity diagnostic: linearized vs full tilt history
  const std::size_t m = std::min(linL.t.size(), tr.theta_L.size());
  for (std::size_t i = 0; i < m; ++i)
    out.lin_vs_full_max_dtheta =
        std::max(out.lin_vs_full_max_dtheta,
                 std::abs(linL.theta[i] - tr.theta_L[i]));

  ContrastInputs ci;
  ci.delta_phi = std::abs(out.mismatch.delta_phi);
  ci.delta_psi = std::abs(out.mismatch.delta_psi);
  ci.dp_phi = cfg.quantum.dp_phi;
  ci.dp_psi = cfg.quantum.dp_psi;
  ci.B0 = proto.B0;
  ci.theta0 = cfg.rotation.theta0;
  ci.omega0 = cfg.rotation.omega0;
  ci.occupation_n = cfg.quantum.occupation_n;
  out.contrast = gyro_contrast_bound(c, cfg.particle, ci);
}

void run_static(const ScenarioConfig& cfg, RunResult& out) {
  const auto& c = cfg.constants;
  const auto arms = cfg.arms();
  const auto& proto = out.config.protocol;
  const double I = cfg.particle.moment_of_inertia();

  // translational <-> libration fixed point; the cos(theta) correction to the
  // spin force is tiny, so this converges in one or two passes
  auto solL = evolve_branch_closed(c, cfg.particle, proto, arms.first);
  auto solR = evolve_branch_closed(c, cfg.particle, proto, arms.second);
  std::function<double(double)> zL = [&solL](double t) { return solL.z(t); };
  std::function<double(double)> zR = [&solR](double t) { return solR.z(t); };

  StaticRunResult lib;
  TranslationalOde odeL, odeR;
  bool have_ode = false;
  for (int iter = 0; iter < 5; ++iter) {
    lib = integrate_static_arms(c, cfg.particle, proto, zL, zR,
                                cfg.integrator.rel_tol, cfg.integrator.abs_tol,
                                cfg.integrator.sample_dt);
    LinearSeries thL{&lib.arm_L.t, &lib.arm_L.theta};
    LinearSeries thR{&lib.arm_R.t, &lib.arm_R.theta};
    auto newL = evolve_branch_ode(c, cfg.particle, proto, arms.first, thL,
                                  cfg.integrator.rel_tol,
                                  cfg.integrator.abs_tol,
                                  cfg.integrator.sample_dt);
    auto newR = evolve_branch_ode(c, cfg.particle, proto, arms.second, thR,
                                  cfg.integrator.rel_tol,
                                  cfg.integrator.abs_tol,
                                  cfg.integrator.sample_dt);
    double dz = 0.0;
    for (std::size_t i = 0; i < newL.t.size(); ++i) {
      dz = std::max(dz, std::abs(newL.z[i] - zL(newL.t[i])));
      dz = std::max(dz, std::abs(newR.z[i] - zR(newR.t[i])));
    }
    odeL = std::move(newL);
    odeR = std::move(newR);
    have_ode = true;
    zL = LinearSeries{&odeL.t, &odeL.z};
    zR = LinearSeries{&odeR.t, &odeR.z};
    if (dz < 1e-11) break;
  }

  // Gaussian packet widths, chained across the smooth protocol windows; the
  // extension window past tau4 feeds the contrast-peak scan
  const double t_ext = 0.03;
  const double sigma0 =
      ground_state_width(c, I, libration_frequency(c, cfg.particle, proto.B0));
  auto widths = [&](const SpinBranch& branch,
                    const std::function<double(double)>& z_fn,
                    const TranslationalSolution& z_closed) {
    PacketSeries acc;
    GaussianPacket pk{sigma0, 0.0};
    const double edges[6] = {0.0,         proto.tau1, proto.tau2,
                             proto.tau3,  proto.tau4, proto.tau4 + t_ext};
    for (int k = 0; k < 5; ++k) {
      const int s = branch.s_at(edges[k], proto.tau3);
      // past tau4 the sampled z series ends; the closed form extrapolates
      auto w2 = [&](double t) {
        if (s != -1) return 0.0;
        const double z = t <= proto.tau4 ? z_fn(t) : z_closed.z(t);
        return c.mu_nv * b_com(proto, t, z) / I;
      };
      auto part = packet_width_evolution(c, cfg.particle, w2, edges[k],
                                         edges[k + 1], pk, 1e-10, 1e-16,
                                         cfg.integrator.sample_dt);
      for (std::size_t i = (k == 0 ? 0 : 1); i < part.t.size(); ++i) {
        acc.t.push_back(part.t[i]);
        acc.packet.push_back(part.packet[i]);
      }
      pk = part.final_packet;
    }
    acc.final_packet = pk;
    return acc;
  };
  const auto widthL = widths(arms.first, zL, solL);
  const auto widthR = widths(arms.second, zR, solR);

  std::vector<double> sigL_t = widthL.t, sigL_v, sigLd_v;
  for (const auto& p : widthL.packet) {
    sigL_v.push_back(p.sigma);
    sigLd_v.push_back(p.sigma_dot);
  }
  std::vector<double> sigR_t = widthR.t, sigR_v, sigRd_v;
  for (const auto& p : widthR.packet) {
    sigR_v.push_back(p.sigma);
    sigRd_v.push_back(p.sigma_dot);
  }
  LinearSeries sL{&sigL_t, &sigL_v}, sLd{&sigL_t, &sigLd_v};
  LinearSeries sR{&sigR_t, &sigR_v}, sRd{&sigR_t, &sigRd_v};

  // assemble the uniform-grid table
  auto& tr = out.trajectory;
  LinearSeries thL{&lib.arm_L.t, &lib.arm_L.theta};
  LinearSeries thR{&lib.arm_R.t, &lib.arm_R.theta};
  LinearSeries thLd{&lib.arm_L.t, &lib.arm_L.theta_dot};
  LinearSeries thRd{&lib.arm_R.t, &lib.arm_R.theta_dot};
  for (double t = 0.0; t <= proto.tau4 + 0.5 * cfg.integrator.sample_dt;
       t += cfg.integrator.sample_dt) {
    const double tt = std::min(t, proto.tau4);
    tr.t.push_back(tt);
    const double zl = zL(tt), zr = zR(tt);
    tr.z_L.push_back(zl);
    tr.z_R.push_back(zr);
    if (have_ode) {
      tr.pz_L.push_back(LinearSeries{&odeL.t, &odeL.p_z}(tt));
      tr.pz_R.push_back(LinearSeries{&odeR.t, &odeR.p_z}(tt));
    } else {
      tr.pz_L.push_back(solL.eval(tt).p_z);
      tr.pz_R.push_back(solR.eval(tt).p_z);
    }
    tr.theta_L.push_back(thL(tt));
    tr.theta_R.push_back(thR(tt));
    tr.theta_dot_L.push_back(thLd(tt));
    tr.theta_dot_R.push_back(thRd(tt));
    tr.sigma_L.push_back(sL(tt));
    tr.sigma_R.push_back(sR(tt));
    tr.contrast_gaussian.push_back(
        gaussian_contrast(c, I, sL(tt), sLd(tt), sR(tt), sRd(tt)));
    out.max_separation = std::max(out.max_separation, std::abs(zl - zr));
  }

  out.mismatch.delta_theta = lib.delta_theta;
  out.mismatch.delta_p_theta = lib.delta_p_theta;

  StaticSummary ss;
  ss.sigma0 = sigma0;
  ss.sigma_L_tau4 = sL(proto.tau4);
  ss.sigma_R_tau4 = sR(proto.tau4);
  // coherence lengths from the minimum-uncertainty initial packet and the
  // final spread of the free arm
  ss.lambda_theta = 2.0 * sigma0;
  // momentum coherence length from the angular spread of the arm that flies
  // free after the flip (the trapped arm's width oscillates; the free arm's
  // monotone expansion is the relevant final uncertainty)
  const double sigma_free = arms.first.s_after_flip == 0
                                ? ss.sigma_L_tau4
                                : ss.sigma_R_tau4;
  ss.lambda_p = c.hbar / sigma_free;
  ss.gaussian_contrast_tau4 = gaussian_contrast(
      c, I, sL(proto.tau4), sLd(proto.tau4), sR(proto.tau4), sRd(proto.tau4));
  ss.semiclassical_contrast =
      semiclassical_contrast(lib.delta_theta, lib.delta_p_theta,
                             ss.lambda_theta, ss.lambda_p);
  ss.libration_omega_tau4 =
      libration_frequency(c, cfg.particle, b_com(proto, proto.tau4,
                                                 zR(proto.tau4)));
  ss.two_omega_tau4 = 2.0 * ss.libration_omega_tau4;

  // Contrast-peak recurrence around tau4. The overlap spikes are far
  // narrower than any practical sampling grid (sub-microsecond), but each
  // spike cluster sits at a maximum of the re-trapped arm's width
  // oscillation, which is smooth and well resolved: counting those maxima
  // measures the same recurrence robustly. The re-trapped arm is the one
  // whose spin is -1 after the flip.
  {
    const bool trapped_is_R = arms.second.s_after_flip == -1;
    const auto& pt = trapped_is_R ? sigR_t : sigL_t;
    const auto& pv = trapped_is_R ? sigR_v : sigL_v;
    const double t_lo = proto.tau4 - t_ext;
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < pt.size(); ++i) {
      if (pt[i] < t_lo) continue;
      if (pv[i] >= pv[i - 1] && pv[i] > pv[i + 1]) peaks.push_back(pt[i]);
    }
    if (peaks.size() >= 2) {
      const double span = peaks.back() - peaks.front();
      ss.peak_frequency = units::two_pi * double(peaks.size() - 1) / span;
    }
  }
  out.static_summary = ss;

  // both contrast keys are always reported; the static scheme has no thermal
  // model, so the thermal value repeats the zero-temperature one
  const double total = ss.gaussian_contrast_tau4 * ss.semiclassical_contrast;
  out.contrast.contrast_zero_T = total;
  out.contrast.contrast_thermal = total;
  out.contrast.contrast_integral = total;
  out.contrast.occupation_n = cfg.quantum.occupation_n;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  config.particle.validate();
  config.protocol.validate();
  config.rotation.validate();
  config.quantum.validate();
  if (config.scheme == Scheme::GyroscopicPm1 && !(config.rotation.omega0 > 0.0))
    throw ParameterError(
        "run_scenario: gyroscopic scheme needs omega0 > 0; use the "
        "static_0m1 scheme for a non-rotating particle");

  RunResult out;
  out.config = config;
  out.regime = validate_regime(config.constants, config.particle,
                               config.rotation, config.protocol.B0);

  if (config.auto_close) {
    out.closure = close_interferometer(config.constants, config.particle,
                                       config.protocol, config.arms());
    out.config.protocol = out.closure->protocol;
  }

  if (config.scheme == Scheme::GyroscopicPm1)
    run_gyroscopic(config, out);
  else
    run_static(config, out);

  out.provenance.config_hash = fnv1a_hex(out.config.canonical_json());
  out.provenance.integrator = config.integrator;
  out.provenance.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return out;
}

// ---------------------------------------------------------------------------
// sweeps

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "omega0") return SweepAxis::Omega0;
  if (s == "dp") return SweepAxis::Dp;
  if (s == "n") return SweepAxis::N;
  if (s == "mass") return SweepAxis::Mass;
  throw ConfigError({"unknown sweep axis '" + s +
                     "'; expected omega0, dp, n or mass"});
}

namespace {

ScenarioConfig with_axis_value(const ScenarioConfig& base, SweepAxis axis,
                               double value) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::Omega0:
      cfg.rotation.omega0 = value;
      break;
    case SweepAxis::Dp:
      cfg.quantum = QuantumInit::from_dp_psi(value * cfg.constants.hbar,
                                             cfg.rotation.theta0,
                                             cfg.quantum.occupation_n);
      break;
    case SweepAxis::N:
      cfg.quantum.occupation_n = value;
      break;
    case SweepAxis::Mass:
      cfg.particle.mass = value;
      cfg.particle.inertia = 0.0;  // re-derive from the sphere model
      break;
  }
  return cfg;
}

SweepRow sweep_point(const ScenarioConfig& base, SweepAxis axis, double value) {
  SweepRow row;
  row.value = value;
  try {
    const auto res = run_scenario(with_axis_value(base, axis, value));
    row.ok = true;
    row.delta_phi = res.mismatch.delta_phi;
    row.delta_theta = res.mismatch.delta_theta;
    row.contrast_zero_T = res.contrast.contrast_zero_T;
    row.contrast_thermal = res.contrast.contrast_thermal;
    row.regime_pass = res.regime.pass();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, SweepAxis axis,
                                const std::vector<double>& grid,
                                bool parallel) {
  if (grid.empty()) throw ParameterError("run_sweep: empty grid");
  ScenarioConfig base = config;
  base.outputs = {};  // sweep points never write files

  std::vector<SweepRow> rows(grid.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < long(grid.size()); ++i)
      rows[std::size_t(i)] = sweep_point(base, axis, grid[std::size_t(i)]);
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i)
      rows[i] = sweep_point(base, axis, grid[i]);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// emission

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void put(std::ostringstream& os, double v) {
  os << ',';
  os.precision(15);
  os << v;
}

}  // namespace

std::string trajectory_csv(const RunResult& result, int stride) {
  if (stride < 1) throw ParameterError("trajectory_csv: stride must be >= 1");
  const auto& tr = result.trajectory;
  std::ostringstream os;
  const bool gyro = result.config.scheme == Scheme::GyroscopicPm1;
  if (gyro)
    os << "t_s,z_L_m,z_R_m,pz_L,pz_R,theta_L_rad,theta_R_rad,"
          "theta_bar_L_rad,theta_bar_R_rad,phi_L_rad,phi_R_rad,"
          "psi_L_rad,psi_R_rad\n";
  else
    os << "t_s,z_L_m,z_R_m,pz_L,pz_R,theta_L_rad,theta_R_rad,"
          "theta_dot_L_rad_s,theta_dot_R_rad_s,sigma_L_rad,sigma_R_rad,"
          "contrast_gaussian\n";
  for (std::size_t i = 0; i < tr.t.size(); i += std::size_t(stride)) {
    os.precision(15);
    os << tr.t[i];
    put(os, tr.z_L[i]);
    put(os, tr.z_R[i]);
    put(os, tr.pz_L[i]);
    put(os, tr.pz_R[i]);
    put(os, tr.theta_L[i]);
    put(os, tr.theta_R[i]);
    if (gyro) {
      put(os, tr.theta_bar_L[i]);
      put(os, tr.theta_bar_R[i]);
      put(os, tr.phi_L[i]);
      put(os, tr.phi_R[i]);
      put(os, tr.psi_L[i]);
      put(os, tr.psi_R[i]);
    } else {
      put(os, tr.theta_dot_L[i]);
      put(os, tr.theta_dot_R[i]);
      put(os, tr.sigma_L[i]);
      put(os, tr.sigma_R[i]);
      put(os, tr.contrast_gaussian[i]);
    }
    os << '\n';
  }
  return os.str();
}

std::string report_json_text(const RunResult& r) {
  json j;
  const auto& cfg = r.config;
  j["scheme"] =
      cfg.scheme == Scheme::GyroscopicPm1 ? "gyroscopic_pm1" : "static_0m1";
  j["protocol"] = {{"B0_tesla", cfg.protocol.B0},
                   {"B1_tesla", cfg.protocol.B1},
                   {"eta_tesla_per_m", cfg.protocol.eta},
                   {"tau1_s", cfg.protocol.tau1},
                   {"tau2_s", cfg.protocol.tau2},
                   {"tau3_s", cfg.protocol.tau3},
                   {"tau4_s", cfg.protocol.tau4}};
  j["regime"] = {{"omega0_rad_s", r.regime.omega0},
                 {"omega_low_rad_s", r.regime.omega_low},
                 {"omega_larmor_rad_s", r.regime.omega_larmor},
                 {"omega_zfs_minus_rad_s", r.regime.omega_zfs_minus},
                 {"margin_lower", r.regime.margin_lower},
                 {"margin_upper", r.regime.margin_upper},
                 {"margin_zfs", r.regime.margin_zfs},
                 {"pass_lower", r.regime.pass_lower},
                 {"pass_upper", r.regime.pass_upper},
                 {"pass_zfs", r.regime.pass_zfs},
                 {"pass", r.regime.pass()}};
  if (r.closure) {
    j["closure"] = {{"tau3_s", r.closure->protocol.tau3},
                    {"tau4_s", r.closure->protocol.tau4},
                    {"residual_z_m", r.closure->residual_z},
                    {"residual_p_kg_m_s", r.closure->residual_p},
                    {"iterations", r.closure->iterations}};
  }
  j["mismatch"] = {{"delta_theta_rad", r.mismatch.delta_theta},
                   {"delta_p_theta_J_s", r.mismatch.delta_p_theta},
                   {"delta_phi_rad", r.mismatch.delta_phi},
                   {"delta_psi_rad", r.mismatch.delta_psi},
                   {"delta_theta_full_rad", r.mismatch.delta_theta_full},
                   {"delta_phi_full_rad", r.mismatch.delta_phi_full},
                   {"delta_psi_full_rad", r.mismatch.delta_psi_full},
                   {"delta_theta_bound_rad", r.mismatch.delta_theta_bound},
                   {"sigma_A_minus_sigma_B_rad_s",
                    r.mismatch.sigma_A_minus_sigma_B},
                   {"delta_phi_area_rad", r.mismatch.delta_phi_area}};
  j["contrast"] = {{"delta_phi_rad", r.contrast.delta_phi},
                   {"delta_psi_rad", r.contrast.delta_psi},
                   {"dp_phi_J_s", r.contrast.dp_phi},
                   {"dp_psi_J_s", r.contrast.dp_psi},
                   {"third_term_exponent", r.contrast.third_term_exponent},
                   {"contrast_zero_T", r.contrast.contrast_zero_T},
                   {"contrast_thermal", r.contrast.contrast_thermal},
                   {"contrast_integral", r.contrast.contrast_integral},
                   {"occupation_n", r.contrast.occupation_n}};
  if (r.static_summary) {
    const auto& s = *r.static_summary;
    j["static"] = {{"sigma0_rad", s.sigma0},
                   {"sigma_L_tau4_rad", s.sigma_L_tau4},
                   {"sigma_R_tau4_rad", s.sigma_R_tau4},
                   {"lambda_theta_rad", s.lambda_theta},
                   {"lambda_p_J_s", s.lambda_p},
                   {"gaussian_contrast_tau4", s.gaussian_contrast_tau4},
                   {"semiclassical_contrast", s.semiclassical_contrast},
                   {"peak_frequency_rad_s", s.peak_frequency},
                   {"two_omega_tau4_rad_s", s.two_omega_tau4},
                   {"thermal_model", "none"}};
  }
  j["max_separation_m"] = r.max_separation;
  j["lin_vs_full_max_dtheta_rad"] = r.lin_vs_full_max_dtheta;
  j["provenance"] = {
      {"config_hash", r.provenance.config_hash},
      {"wall_time_s", r.provenance.wall_time_s},
      {"rel_tol", r.provenance.integrator.rel_tol},
      {"abs_tol", r.provenance.integrator.abs_tol},
      {"steps_per_period", r.provenance.integrator.steps_per_period},
      {"field_sign_strict", r.provenance.integrator.field_sign_strict},
      {"sample_dt_s", r.provenance.integrator.sample_dt}};
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis) {
  const char* name = "value";
  switch (axis) {
    case SweepAxis::Omega0: name = "omega0_rad_s"; break;
    case SweepAxis::Dp: name = "dp_psi_hbar"; break;
    case SweepAxis::N: name = "occupation_n"; break;
    case SweepAxis::Mass: name = "mass_kg"; break;
  }
  std::ostringstream os;
  os << name
     << ",ok,delta_phi_rad,delta_theta_rad,contrast_zero_T,contrast_thermal,"
        "regime_pass,error\n";
  for (const auto& row : rows) {
    os.precision(15);
    os << row.value << ',' << (row.ok ? 1 : 0);
    put(os, row.delta_phi);
    put(os, row.delta_theta);
    put(os, row.contrast_zero_T);
    put(os, row.contrast_thermal);
    os << ',' << (row.regime_pass ? 1 : 0) << ',';
    std::string err = row.error;
    std::replace(err.begin(), err.end(), '\n', ' ');
    if (err.find(',') != std::string::npos ||
        err.find('"') != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : err) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      err = quoted + "\"";
    }
    os << err << '\n';
  }
  return os.str();
}

void emit_outputs(const RunResult& result, const OutputConfig& outputs) {
  if (!outputs.trajectory_csv.empty()) {
    std::ofstream f(outputs.trajectory_csv);
    if (!f)
      throw NumericalError("emit_outputs: cannot write " +
                           outputs.trajectory_csv);
    f << trajectory_csv(result, outputs.sample_stride);
  }
  if (!outputs.report_json.empty()) {
    std::ofstream f(outputs.report_json);
    if (!f)
      throw NumericalError("emit_outputs: cannot write " + outputs.report_json);
    f << report_json_text(result);
  }
}

}  // namespace sgi
