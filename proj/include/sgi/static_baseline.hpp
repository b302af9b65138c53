#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/field.hpp"
#include "sgi/params.hpp"
#include "sgi/translational.hpp"

namespace sgi {

/// Gaussian tilt packet. beta = I sigma_dot / (hbar sigma) is the phase
/// curvature of the packet.
struct GaussianPacket {
  double sigma = 0.0;      // rad
  double sigma_dot = 0.0;  // rad/s

  double beta(const PhysicalConstants& c, double inertia) const {
    return inertia * sigma_dot / (c.hbar * sigma);
  }
};

/// Ground-state width of the libration trap at frequency omega.
double ground_state_width(const PhysicalConstants& c, double inertia,
                          double omega);

/// Libration frequency omega(t) = sqrt(mu B_c(t) / I).
double libration_frequency(const PhysicalConstants& c,
                           const ParticleParams& particle, double B_c);

/// Full tilt acceleration for the non-rotating scheme; linear=true uses the
/// small-angle form s w^2 (theta - eta_tilde d sin(alpha)/B_c).
double libration_eom(const PhysicalConstants& c, const ParticleParams& particle,
                     double theta, int s, double B_c, double eta_tilde,
                     bool linear = false);

/// Analytic mismatch envelope at flip phase gamma_theta:
/// delta_theta = (eta d sin a / B1) sqrt(mu B0 / I) (tau4 - tau3) sin(gamma),
/// delta_p     = I (eta d sin a / B1) sqrt(mu B0 / I) sin(gamma).
std::pair<double, double> static_mismatch_estimates(
    const PhysicalConstants& c, const ParticleParams& particle,
    const FieldProtocol& protocol, double d, double alpha, double gamma_theta);

struct StaticArmSeries {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> theta_dot;
};

struct StaticRunResult {
  StaticArmSeries arm_L;  // s = -1 -> 0
  StaticArmSeries arm_R;  // s = 0 -> -1
  double delta_theta = 0.0;      // rad at tau4
  double delta_theta_dot = 0.0;  // rad/s at tau4
  double delta_p_theta = 0.0;    // J s at tau4
  double gamma_theta = 0.0;      // libration phase of arm L at tau3
};

/// Integrates both arms' tilt dynamics over [0, tau4] with the flip at tau3.
/// B_c(t) per arm comes from that arm's translational trajectory, passed as
/// z(t) callables so closed-form and ODE-derived paths both fit.
StaticRunResult integrate_static_arms(const PhysicalConstants& c,
                                      const ParticleParams& particle,
                                      const FieldProtocol& protocol,
                                      const std::function<double(double)>& z_L,
                                      const std::function<double(double)>& z_R,
                                      double rel_tol = 1e-10,
                                      double abs_tol = 1e-13,
                                      double sample_dt = 1e-4);

struct PacketSeries {
  std::vector<double> t;
  std::vector<GaussianPacket> packet;
  GaussianPacket final_packet;
};

/// Gaussian-ansatz width evolution sigma'' = -w^2(t) sigma + hbar^2/(4 I^2 s^3)
/// under a time-dependent trap frequency squared (may be zero: free spread).
PacketSeries packet_width_evolution(const PhysicalConstants& c,
                                    const ParticleParams& particle,
                                    const std::function<double(double)>& omega_sq,
                                    double t0, double t1,
                                    const GaussianPacket& initial,
                                    double rel_tol = 1e-10,
                                    double abs_tol = 1e-16,
                                    double sample_dt = 1e-4);

/// Overlap magnitude of two Gaussian tilt packets with widths/width-rates.
double gaussian_contrast(const PhysicalConstants& c, double inertia,
                         double sigma_L, double sigma_dot_L, double sigma_R,
                         double sigma_dot_R);

/// exp[-1/2 (dtheta^2/lambda_theta^2 + dp^2/lambda_p^2)].
double semiclassical_contrast(double delta_theta, double delta_p_theta,
                              double lambda_theta, double lambda_p);

}  // namespace sgi
