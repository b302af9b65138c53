// Acceptance gate: one PASS/FAIL line per criterion, exit code = #failures.
//
// Each criterion is evaluated independently; an exception inside one
// criterion fails that criterion only.

#include <array>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sgi/contrast.hpp"
#include "sgi/rotational.hpp"
#include "sgi/scenario.hpp"
#include "sgi/spin_levels.hpp"
#include "sgi/static_baseline.hpp"
#include "sgi/translational.hpp"

using namespace sgi;

namespace {

int failures = 0;

void report(int num, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", num,
              what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

void criterion(int num, const std::string& what,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(num, what, ok, detail);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

}  // namespace

int main() {
  const PhysicalConstants constants;

  // shared reference runs
  RunResult gyro, stat;
  bool have_gyro = false, have_stat = false;
  try {
    gyro = run_scenario(ScenarioConfig::preset("fig3"));
    have_gyro = true;
  } catch (const std::exception& e) {
    std::printf("FAIL setup: rotating reference run threw (%s)\n", e.what());
    ++failures;
  }
  try {
    stat = run_scenario(ScenarioConfig::preset("figA2"));
    have_stat = true;
  } catch (const std::exception& e) {
    std::printf("FAIL setup: static reference run threw (%s)\n", e.what());
    ++failures;
  }

  // 1 -----------------------------------------------------------------------
  criterion(1, "branch separations at the reference protocols",
            [&](std::string& d) {
              if (!have_gyro || !have_stat) {
                d = "reference runs unavailable";
                return false;
              }
              const double sep_zm = stat.max_separation;
              const double sep_pm = gyro.max_separation;
              d = fmt("|0,-1| max sep = %.3e m, |+1,-1| max sep = %.3e m, "
                      "ratio = %.2f",
                      sep_zm, sep_pm, sep_pm / sep_zm);
              const bool zm_ok = sep_zm >= 0.5e-5 && sep_zm <= 2.0e-5;
              const bool pm_ok = sep_pm >= 1.8 * sep_zm;
              return zm_ok && pm_ok;
            });

  // 2 -----------------------------------------------------------------------
  criterion(2, "interferometer closure times and residuals",
            [&](std::string& d) {
              ParticleParams particle;
              particle.mass = 1e-17;
              auto proto_pm = ScenarioConfig::preset("fig3").protocol;
              proto_pm.tau3 *= 1.03;
              proto_pm.tau4 *= 0.97;
              const auto pm = close_interferometer(constants, particle,
                                                   proto_pm,
                                                   SpinBranch::pm_pair());
              auto proto_zm = ScenarioConfig::preset("figA2").protocol;
              proto_zm.tau3 *= 0.97;
              proto_zm.tau4 *= 1.03;
              const auto zm = close_interferometer(constants, particle,
                                                   proto_zm,
                                                   SpinBranch::zm_pair());
              d = fmt("pm tau3 = %.4f, tau4 = %.4f (rz = %.1e m); "
                      "zm tau3 = %.4f, tau4 = %.4f (rz = %.1e m)",
                      pm.protocol.tau3, pm.protocol.tau4, pm.residual_z,
                      zm.protocol.tau3, zm.protocol.tau4, zm.residual_z);
              const double v_tol = particle.mass * 1e-9;  // 1 nm/s
              return pm.converged && zm.converged &&
                     within(pm.protocol.tau3, 0.8022, 0.10) &&
                     within(pm.protocol.tau4, 1.320, 0.10) &&
                     within(zm.protocol.tau3, 0.800, 0.10) &&
                     within(zm.protocol.tau4, 1.314, 0.10) &&
                     std::abs(pm.residual_z) <= 1e-9 &&
                     std::abs(zm.residual_z) <= 1e-9 &&
                     std::abs(pm.residual_p) <= v_tol &&
                     std::abs(zm.residual_p) <= v_tol;
            });

  // 3 -----------------------------------------------------------------------
  criterion(3, "rotating-scheme angle mismatches and their 1/omega0 scaling",
            [&](std::string& d) {
              if (!have_gyro) {
                d = "reference run unavailable";
                return false;
              }
              const auto& m = gyro.mismatch;
              const double dphi = std::abs(m.delta_phi);
              const double dpsi = std::abs(m.delta_psi);
              auto cfg = ScenarioConfig::preset("fig3");
              cfg.rotation.omega0 *= 10.0;
              const auto fast = run_scenario(cfg);
              const double ratio =
                  std::abs(fast.mismatch.delta_phi) / dphi;
              d = fmt("|dphi| = %.4f, |dtheta| = %.3e (bound %.3e), "
                      "dphi(10 w0)/dphi = %.3f",
                      dphi, std::abs(m.delta_theta), m.delta_theta_bound,
                      ratio);
              return dphi >= 0.025 && dphi <= 0.10 &&
                     std::abs(dphi - dpsi) <= 1e-6 * dphi &&
                     std::abs(m.delta_theta) <= m.delta_theta_bound &&
                     std::abs(m.delta_theta) >= 0.05 * m.delta_theta_bound &&
                     ratio >= 0.08 && ratio <= 0.12;
            });

  // 4 -----------------------------------------------------------------------
  criterion(4, "contrast recovery with spin speed, width and temperature",
            [&](std::string& d) {
              if (!have_gyro) {
                d = "reference run unavailable";
                return false;
              }
              ContrastInputs anchor;
              anchor.delta_phi = std::abs(gyro.mismatch.delta_phi);
              anchor.delta_psi = std::abs(gyro.mismatch.delta_psi);
              anchor.B0 = gyro.config.protocol.B0;
              anchor.theta0 = gyro.config.rotation.theta0;
              anchor.omega0 = gyro.config.rotation.omega0;
              std::vector<double> grid;
              for (double f = 1e4; f <= 5e4 + 1.0; f += 2.5e3)
                grid.push_back(units::hz_to_rad_s(f));
              const double hb = constants.hbar;
              const std::vector<ContrastFamily> fams = {
                  {hb * std::cos(anchor.theta0), hb, 0.0},
                  {7.0 * hb * std::cos(anchor.theta0), 7.0 * hb, 0.0},
                  {hb * std::cos(anchor.theta0), hb, 20.0},
              };
              const auto curve = contrast_vs_omega0_curve(
                  constants, gyro.config.particle, anchor, grid, fams);
              bool monotone = true, seven_below = true;
              for (std::size_t i = 0; i < curve.size(); ++i) {
                if (i > 0)
                  for (std::size_t f = 0; f < fams.size(); ++f)
                    monotone &= curve[i].contrast[f] >
                                curve[i - 1].contrast[f];
                seven_below &= curve[i].contrast[1] < curve[i].contrast[0];
              }
              const auto& top = curve.back().contrast;  // 2 pi x 50 kHz
              d = fmt("C(50 kHz): dp=hbar %.4f, dp=7hbar %.4f, n=20 %.4f; "
                      "monotone=%d",
                      top[0], top[1], top[2], int(monotone));
              return monotone && seven_below && top[0] >= 0.99 &&
                     top[2] >= 0.95;
            });

  // 5 -----------------------------------------------------------------------
  criterion(5, "frequency-scale hierarchy of the operating regime",
            [&](std::string& d) {
              ParticleParams particle;
              particle.mass = 1e-17;
              const double I = particle.moment_of_inertia();
              const auto proto = ScenarioConfig::preset("fig3").protocol;
              const double w_low = std::sqrt(constants.mu_nv * proto.B0 / I);
              const double f_B1 = constants.mu_nv * proto.B1 / constants.h;
              const double f_B0 = constants.mu_nv * proto.B0 / constants.h;
              d = fmt("sqrt(mu B0/I) = 2 pi x %.0f Hz; mu B/h = %.1f .. "
                      "%.0f MHz",
                      units::rad_s_to_hz(w_low), f_B1 / 1e6, f_B0 / 1e6);
              return w_low >= units::hz_to_rad_s(50.0) &&
                     w_low <= units::hz_to_rad_s(1e3) && f_B1 >= 1e6 &&
                     f_B1 < 1e7 && f_B0 >= 1e8 && f_B0 < 1e9;
            });

  // 6 -----------------------------------------------------------------------
  criterion(6, "non-rotating baseline: tilt kick, dephasing, and recurrences",
            [&](std::string& d) {
              if (!have_stat) {
                d = "reference run unavailable";
                return false;
              }
              const auto& ss = *stat.static_summary;
              const double dth = std::abs(stat.mismatch.delta_theta);
              const double I = stat.config.particle.moment_of_inertia();
              const double semi = semiclassical_contrast(
                  stat.mismatch.delta_theta, stat.mismatch.delta_p_theta,
                  0.002, I * 0.003);
              const double f_rec =
                  std::abs(ss.peak_frequency - ss.two_omega_tau4) /
                  ss.two_omega_tau4;
              const double f_300 =
                  std::abs(ss.libration_omega_tau4 -
                           units::hz_to_rad_s(300.0)) /
                  units::hz_to_rad_s(300.0);
              d = fmt("|dtheta| = %.3f, semiclassical C = %.1e, "
                      "recurrence %.1f vs 2w %.1f rad/s, w(tau4) = 2 pi x "
                      "%.0f Hz",
                      dth, semi, ss.peak_frequency, ss.two_omega_tau4,
                      units::rad_s_to_hz(ss.libration_omega_tau4));
              return dth >= 0.15 && dth <= 0.60 && semi < 1e-3 &&
                     f_rec <= 0.10 && f_300 <= 0.10;
            });

  // 7 -----------------------------------------------------------------------
  criterion(7, "contrast-loss threshold versus the NV off-centring",
            [&](std::string& d) {
              // sweep |d sin(alpha)| and find where the semiclassical
              // contrast crosses 1/2
              const double sin_a = std::sin(std::numbers::pi / 6.0);
              const double targets_nm[] = {0.005, 0.01, 0.02,
                                           0.04,  0.07, 0.12};
              double prev_ds = 0.0, prev_c = 1.0, crossing = -1.0;
              for (double ds_nm : targets_nm) {
                auto cfg = ScenarioConfig::preset("figA2");
                cfg.particle.nv_offset_d = units::nm_to_m(ds_nm) / sin_a;
                const auto res = run_scenario(cfg);
                const double cc = res.static_summary->semiclassical_contrast;
                if (prev_c >= 0.5 && cc < 0.5) {
                  // geometric interpolation on the Gaussian tail
                  const double la = std::sqrt(-2.0 * std::log(prev_c + 1e-300));
                  const double lb = std::sqrt(-2.0 * std::log(cc));
                  const double lt = std::sqrt(-2.0 * std::log(0.5));
                  crossing = prev_ds + (ds_nm - prev_ds) * (lt - la) /
                                           (lb - la);
                  break;
                }
                prev_ds = ds_nm;
                prev_c = cc;
              }
              d = fmt("C = 1/2 at |d sin(alpha)| = %.3f nm "
                      "(expected 0.05 nm within 3x)",
                      crossing);
              return crossing >= 0.05 / 3.0 && crossing <= 0.05 * 3.0;
            });

  // 8 -----------------------------------------------------------------------
  criterion(8, "spin-level leakage over a 10 us window",
            [&](std::string& d) {
              const auto params = SpinHamiltonianParams::from_physical(
                  constants, units::gauss_to_tesla(100.0), 0.01,
                  units::hz_to_rad_s(1e4));
              SpinAmplitudes init;
              init.c_minus = {1.0, 0.0};
              const auto series =
                  evolve_spin(constants, init, params, 1e-5, 5000);
              const double w_over_d = params.W / std::min(params.Delta_plus,
                                                          params.Delta_minus);
              const double scale = w_over_d * w_over_d;
              const double ratio = series.max_transfer / scale;
              d = fmt("max transfer = %.2e, (W/Delta)^2 = %.2e, ratio = %.2f",
                      series.max_transfer, scale, ratio);
              return series.max_transfer <= 1e-5 && ratio >= 0.1 &&
                     ratio <= 10.0;
            });

  // 9 -----------------------------------------------------------------------
  criterion(9, "property suite: conservation, consistency, unitarity",
            [&](std::string& d) {
              ParticleParams particle;
              particle.mass = 1e-17;
              particle.nv_offset_d = 1e-8;
              particle.nv_angle_alpha = std::numbers::pi / 6.0;
              const double I = particle.moment_of_inertia();
              const auto proto = ScenarioConfig::preset("fig3").protocol;
              int bad = 0;
              std::string parts;

              // (a) Hamilton RHS vs finite differences of H, 100 states
              {
                std::mt19937 rng(7);
                std::uniform_real_distribution<double> ang(
                    0.3, std::numbers::pi - 0.3);
                std::uniform_real_distribution<double> full(-3.0, 3.0);
                std::uniform_real_distribution<double> mom(-1.0, 1.0);
                const double ps = I * units::hz_to_rad_s(1e4);
                bool ok = true;
                for (int k = 0; k < 100 && ok; ++k) {
                  RotVec y{ang(rng), full(rng), full(rng),
                           0.1 * ps * mom(rng), ps * mom(rng), ps * mom(rng)};
                  const int s = (k % 2) ? 1 : -1;
                  const auto rhs = hamilton_rhs(constants, particle, y, 0.008,
                                                45.0, s);
                  auto H = [&](const RotVec& v) {
                    return rotational_hamiltonian(constants, particle, v,
                                                  0.008, 45.0, s);
                  };
                  const double hs = std::abs(H(y)) + ps * ps / I;
                  for (int i = 0; i < 6 && ok; ++i) {
                    const double h = 1e-6 * (i < 3 ? 1.0 : ps);
                    RotVec hi = y, lo = y;
                    hi[i] += h;
                    lo[i] -= h;
                    const double dH = (H(hi) - H(lo)) / (2.0 * h);
                    const double expect = i < 3 ? -rhs[i + 3] : rhs[i - 3];
                    ok = std::abs(expect - dH) <=
                         1e-6 * std::max(std::abs(dH), std::abs(expect)) +
                             1e-13 * hs / h;
                  }
                }
                if (!ok) {
                  ++bad;
                  parts += " FD-Hamiltonian";
                }
              }

              // (b) p_phi / p_psi conservation at d = 0
              {
                ParticleParams centred = particle;
                centred.nv_offset_d = 0.0;
                const auto arm = SpinBranch::pm_pair().first;
                const auto sol = evolve_branch_closed(constants, centred,
                                                      proto, arm);
                RotationInit rot{units::hz_to_rad_s(1e4), 0.01};
                const auto traj = integrate_full(constants, centred, proto,
                                                 arm, sol, rot, RotOptions{});
                const double p0 = traj.samples.front().p_phi;
                const double q0 = traj.samples.front().p_psi;
                double drift = 0.0;
                for (const auto& smp : traj.samples) {
                  drift = std::max(drift, std::abs(smp.p_phi - p0) /
                                              std::abs(p0));
                  drift = std::max(drift, std::abs(smp.p_psi - q0) /
                                              std::abs(q0));
                }
                if (drift > 1e-8) {
                  ++bad;
                  parts += " momentum-conservation";
                }
              }

              // (c) stage-wise translational energy conservation, rel 1e-8
              {
                bool ok = true;
                const auto arms = SpinBranch::pm_pair();
                for (const auto& arm : {arms.first, arms.second}) {
                  const auto sol = evolve_branch_closed(constants, particle,
                                                        proto, arm);
                  const double edges[5] = {0.0, proto.tau1, proto.tau2,
                                           proto.tau3, proto.tau4};
                  for (int k = 0; k < 4 && ok; ++k) {
                    const double eta_t = gradient_sign(proto, edges[k]);
                    const int s = arm.s_at(edges[k], proto.tau3);
                    const double w = trap_frequency(constants, eta_t);
                    auto energy = [&](double t) {
                      const auto st = sol.eval(t);
                      const double dz = st.z - proto.Z0();
                      return st.p_z * st.p_z / (2.0 * particle.mass) +
                             0.5 * particle.mass * w * w * dz * dz +
                             eta_t * constants.mu_nv * s * dz;
                    };
                    const double ea = energy(edges[k] + 1e-9);
                    const double eb = energy(edges[k + 1] - 1e-9);
                    ok = std::abs(ea - eb) <=
                         1e-8 * std::max(std::abs(ea), std::abs(eb));
                  }
                }
                if (!ok) {
                  ++bad;
                  parts += " stage-energy";
                }
              }

              // (d) Gaussian width contrast vs brute-force overlap, abs 1e-6
              {
                const double sL = 1.7e-3, sR = 0.6e-3;
                const double vL = 0.8 * constants.hbar / (I * 1e-3);
                const double vR = 0.2 * constants.hbar / (I * 1e-3);
                const double lim = 10.0 * sL;
                const int n = 40001;
                const double dx = 2.0 * lim / (n - 1);
                std::complex<double> acc{0.0, 0.0};
                for (int i = 0; i < n; ++i) {
                  const double x = -lim + i * dx;
                  const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                  const double env =
                      std::exp(-x * x / (4.0 * sL * sL) -
                               x * x / (4.0 * sR * sR));
                  const double ph = (I / (2.0 * constants.hbar)) * x * x *
                                    (vL / sL - vR / sR);
                  acc += wgt * env * std::exp(std::complex<double>(0.0, ph)) *
                         dx;
                }
                const double brute =
                    std::abs(acc) *
                    std::pow(4.0 * std::numbers::pi * std::numbers::pi * sL *
                                 sL * sR * sR,
                             -0.25);
                const double closed =
                    gaussian_contrast(constants, I, sL, vL, sR, vR);
                if (std::abs(brute - closed) > 1e-6) {
                  ++bad;
                  parts += " width-contrast";
                }
              }

              // (e) closed-form contrast bound vs quadrature, abs 1e-8
              {
                ContrastInputs in;
                in.delta_phi = 0.0794;
                in.delta_psi = 0.0794;
                in.dp_phi = constants.hbar;
                in.dp_psi = constants.hbar;
                in.B0 = proto.B0;
                in.theta0 = 0.01;
                in.omega0 = units::hz_to_rad_s(1e4);
                const auto r = gyro_contrast_bound(constants, particle, in);
                if (std::abs(r.contrast_zero_T - r.contrast_integral) > 1e-8) {
                  ++bad;
                  parts += " contrast-quadrature";
                }
              }

              // (f) spin evolution unitary to 1e-10
              {
                const auto params = SpinHamiltonianParams::from_physical(
                    constants, proto.B0, 0.01, units::hz_to_rad_s(1e4));
                SpinAmplitudes init;
                init.c_minus = {1.0, 0.0};
                const auto series =
                    evolve_spin(constants, init, params, 1e-5, 2000);
                if (series.max_norm_drift > 1e-10) {
                  ++bad;
                  parts += " unitarity";
                }
              }

              // (g) linearized vs full tilt history at d = 0, 1e-2 theta0
              {
                ParticleParams centred = particle;
                centred.nv_offset_d = 0.0;
                auto cfg = ScenarioConfig::preset("fig3");
                cfg.particle = centred;
                const auto res = run_scenario(cfg);
                if (res.lin_vs_full_max_dtheta > 1e-2 * 0.01) {
                  ++bad;
                  parts += " linearized-vs-full";
                }
              }

              d = bad == 0 ? "all 7 property checks passed"
                           : "failing:" + parts;
              return bad == 0;
            });

  std::printf("%s: %d of 9 criteria failed\n",
              failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              failures);
  return failures;
}
