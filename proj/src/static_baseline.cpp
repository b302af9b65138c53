#include "sgi/static_baseline.hpp"

#include <algorithm>
#include <cmath>

#include "sgi/ode.hpp"

namespace sgi {

double ground_state_width(const PhysicalConstants& c, double inertia,
                          double omega) {
  if (!(omega > 0.0))
    throw ParameterError("ground_state_width: omega must be > 0");
  return std::sqrt(c.hbar / (2.0 * inertia * omega));
}

double libration_frequency(const PhysicalConstants& c,
                           const ParticleParams& particle, double B_c) {
  return std::sqrt(c.mu_nv * B_c / particle.moment_of_inertia());
}

double libration_eom(const PhysicalConstants& c, const ParticleParams& particle,
                     double theta, int s, double B_c, double eta_tilde,
                     bool linear) {
  const double I = particle.moment_of_inertia();
  const double d = particle.nv_offset_d;
  const double alpha = particle.nv_angle_alpha;
  if (linear) {
    const double w2 = c.mu_nv * B_c / I;
    return s * w2 * (theta + eta_tilde * d * std::sin(alpha) / B_c);
  }
  const double Bnv = B_c + eta_tilde * d * std::cos(theta + alpha);
  return (c.mu_nv * s / I) *
         (Bnv * std::sin(theta) +
          eta_tilde * d * std::sin(theta + alpha) * std::cos(theta));
}

std::pair<double, double> static_mismatch_estimates(
    const PhysicalConstants& c, const ParticleParams& particle,
    const FieldProtocol& protocol, double d, double alpha,
    double gamma_theta) {
  if (!(protocol.tau4 > protocol.tau3))
    throw ProtocolError("static_mismatch_estimates: need tau4 > tau3");
  const double I = particle.moment_of_inertia();
  const double amp = protocol.eta * d * std::sin(alpha) / protocol.B1;
  const double w = std::sqrt(c.mu_nv * protocol.B0 / I);
  const double sg = std::sin(gamma_theta);
  const double dtheta = amp * w * (protocol.tau4 - protocol.tau3) * sg;
  const double dp = I * amp * w * sg;
  return {dtheta, dp};
}

namespace {

StaticArmSeries integrate_static_arm(const PhysicalConstants& c,
                                     const ParticleParams& particle,
                                     const FieldProtocol& protocol,
                                     const SpinBranch& branch,
                                     const std::function<double(double)>& z_of_t,
                                     double rel_tol, double abs_tol,
                                     double sample_dt) {
  StaticArmSeries out;
  std::array<double, 2> y{0.0, 0.0};  // theta, theta_dot
  const double edges[5] = {0.0, protocol.tau1, protocol.tau2, protocol.tau3,
                           protocol.tau4};
  // resolve the fastest libration the run can reach
  const double w_max = libration_frequency(c, particle, protocol.B0) * 2.0;
  for (int k = 0; k < 4; ++k) {
    const double t0 = edges[k], t1 = edges[k + 1];
    const double eta_t = gradient_sign(protocol, t0);
    const int s = branch.s_at(t0, protocol.tau3);
    auto rhs = [&](double t, const std::array<double, 2>& st) {
      const double B = b_com(protocol, t, z_of_t(t));
      return std::array<double, 2>{st[1],
                                   libration_eom(c, particle, st[0], s, B, eta_t)};
    };
    OdeOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    opt.max_step = units::two_pi / w_max / 32.0;
    opt.sample_dt = sample_dt;
    auto series = integrate_dopri5<2>(rhs, y, t0, t1, opt);
    for (std::size_t i = (k == 0 ? 0 : 1); i < series.t.size(); ++i) {
      out.t.push_back(series.t[i]);
      out.theta.push_back(series.y[i][0]);
      out.theta_dot.push_back(series.y[i][1]);
    }
    y = series.y.back();
  }
  return out;
}

}  // namespace

StaticRunResult integrate_static_arms(const PhysicalConstants& c,
                                      const ParticleParams& particle,
                                      const FieldProtocol& protocol,
                                      const std::function<double(double)>& z_L,
                                      const std::function<double(double)>& z_R,
                                      double rel_tol, double abs_tol,
                                      double sample_dt) {
  const auto arms = SpinBranch::zm_pair();
  StaticRunResult out;
  out.arm_L = integrate_static_arm(c, particle, protocol, arms.first, z_L,
                                   rel_tol, abs_tol, sample_dt);
  out.arm_R = integrate_static_arm(c, particle, protocol, arms.second, z_R,
                                   rel_tol, abs_tol, sample_dt);
  const double I = particle.moment_of_inertia();
  out.delta_theta = out.arm_L.theta.back() - out.arm_R.theta.back();
  out.delta_theta_dot = out.arm_L.theta_dot.back() - out.arm_R.theta_dot.back();
  out.delta_p_theta = I * out.delta_theta_dot;

  // libration phase of the trapped arm at the flip: theta_dot = A w sin(gamma)
  const double B_tau3 = b_com(protocol, protocol.tau3, z_L(protocol.tau3));
  const double w = libration_frequency(c, particle, B_tau3);
  const double amp = protocol.eta * particle.nv_offset_d *
                     std::sin(particle.nv_angle_alpha) / protocol.B1;
  // theta_dot just before tau3
  double td = 0.0;
  for (std::size_t i = 0; i < out.arm_L.t.size(); ++i) {
    if (out.arm_L.t[i] > protocol.tau3) break;
    td = out.arm_L.theta_dot[i];
  }
  if (amp > 0.0 && w > 0.0) {
    const double sg = std::clamp(td / (amp * w), -1.0, 1.0);
    out.gamma_theta = std::asin(sg);
  }
  return out;
}

PacketSeries packet_width_evolution(const PhysicalConstants& c,
                                    const ParticleParams& particle,
                                    const std::function<double(double)>& omega_sq,
                                    double t0, double t1,
                                    const GaussianPacket& initial,
                                    double rel_tol, double abs_tol,
                                    double sample_dt) {
  if (!(initial.sigma > 0.0))
    throw ParameterError("packet_width_evolution: sigma must be > 0");
  const double I = particle.moment_of_inertia();
  const double q = c.hbar * c.hbar / (4.0 * I * I);
  // A re-trapped packet that spread widely while free legitimately squeezes
  // to ~ sigma_gs^2 / sigma_max, orders of magnitude below its starting
  // width; the floor only guards against a genuine numerical collapse.
  const double sigma_floor = 1e-6 * initial.sigma;
  // Trial Runge-Kutta stages may overshoot past sigma = 0; clamping keeps the
  // right-hand side finite so step-size control rejects those steps. Genuine
  // collapse is checked on the accepted solution below (a re-trapped packet
  // that spread while free legitimately squeezes far below its initial width,
  // but never to zero).
  auto rhs = [&](double t, const std::array<double, 2>& y) {
    const double s = std::max(y[0], sigma_floor);
    return std::array<double, 2>{y[1], -omega_sq(t) * s + q / (s * s * s)};
  };
  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.sample_dt = sample_dt;
  // resolve the width oscillation; its frequency is at most ~2 w
  double w_peak = 0.0;
  for (double t = t0; t <= t1; t += std::max((t1 - t0) / 256.0, 1e-9))
    w_peak = std::max(w_peak, std::sqrt(std::max(omega_sq(t), 0.0)));
  if (w_peak > 0.0) opt.max_step = units::two_pi / w_peak / 64.0;

  auto series = integrate_dopri5<2>(rhs, {initial.sigma, initial.sigma_dot},
                                    t0, t1, opt);
  for (const auto& y : series.y)
    if (y[0] <= sigma_floor)
      throw NumericalError("packet_width_evolution: width collapsed");
  PacketSeries out;
  out.t = series.t;
  out.packet.reserve(series.y.size());
  for (const auto& y : series.y) out.packet.push_back({y[0], y[1]});
  out.final_packet = {series.y.back()[0], series.y.back()[1]};
  return out;
}

double gaussian_contrast(const PhysicalConstants& c, double inertia,
                         double sigma_L, double sigma_dot_L, double sigma_R,
                         double sigma_dot_R) {
  if (!(sigma_L > 0.0) || !(sigma_R > 0.0))
    throw ParameterError("gaussian_contrast: widths must be > 0");
  const double ds = sigma_L - sigma_R;
  const double a = 1.0 + ds * ds / (2.0 * sigma_L * sigma_R);
  const double b = (inertia / c.hbar) *
                   (sigma_dot_L * sigma_R - sigma_dot_R * sigma_L);
  return std::pow(a * a + b * b, -0.25);
}

double semiclassical_contrast(double delta_theta, double delta_p_theta,
                              double lambda_theta, double lambda_p) {
  if (!(lambda_theta > 0.0) || !(lambda_p > 0.0))
    throw ParameterError("semiclassical_contrast: coherence lengths must be > 0");
  const double a = delta_theta / lambda_theta;
  const double b = delta_p_theta / lambda_p;
  return std::exp(-0.5 * (a * a + b * b));
}

}  // namespace sgi
