#pragma once

#include <array>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/field.hpp"
#include "sgi/params.hpp"
#include "sgi/translational.hpp"

namespace sgi {

struct RotationalState {
  double theta = 0.0;    // rad
  double phi = 0.0;      // rad
  double psi = 0.0;      // rad
  double p_theta = 0.0;  // J s
  double p_phi = 0.0;    // J s
  double p_psi = 0.0;    // J s
  double t = 0.0;        // s
};

// state vector layout for the integrators
using RotVec = std::array<double, 6>;  // theta, phi, psi, p_theta, p_phi, p_psi

inline RotVec to_vec(const RotationalState& s) {
  return {s.theta, s.phi, s.psi, s.p_theta, s.p_phi, s.p_psi};
}
inline RotationalState from_vec(const RotVec& v, double t) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], t};
}

struct RotOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int steps_per_period = 50;       // nutation-period step cap divisor
  bool field_sign_strict = false;  // evolve the literal signed field instead
  double sample_dt = 1e-4;         // s, dense-output grid
  double singularity_band = 1e-3;  // rad, abort distance from theta = 0, pi
};

/// Rotational Hamiltonian of the symmetric top with the Zeeman term evaluated
/// at the NV site.
double rotational_hamiltonian(const PhysicalConstants& c,
                              const ParticleParams& particle, const RotVec& y,
                              double B_field, double eta_tilde, int s);

/// Hamilton's equations for the state above. B_field is the (signed or
/// absolute, per bookkeeping) axial field at the COM.
RotVec hamilton_rhs(const PhysicalConstants& c, const ParticleParams& particle,
                    const RotVec& y, double B_field, double eta_tilde, int s);

struct RotTrajectory {
  std::vector<RotationalState> samples;
  RotationalState final_state;
  std::size_t n_steps = 0;
};

/// Initial state used throughout: (theta0, 0, 0, 0, I w0 cos(theta0), I w0).
RotationalState rotation_initial_state(const ParticleParams& particle,
                                       const RotationInit& rotation);

/// Full nonlinear Euler-angle integration over [0, tau4] with the spin flip
/// at tau3. B_c(t) comes from the arm's translational trajectory.
RotTrajectory integrate_full(const PhysicalConstants& c,
                             const ParticleParams& particle,
                             const FieldProtocol& protocol,
                             const SpinBranch& branch,
                             const TranslationalSolution& z_of_t,
                             const RotationInit& rotation,
                             const RotOptions& opt = {});

/// Linearized nutation: theta'' = -(w0^2 - mu s Bc/I)(theta - theta0)
///                                + (mu s / I) Bc theta0,
/// with phi and psi accumulated alongside via the small-angle relations.
struct LinTrajectory {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> theta_dot;
  std::vector<double> phi;
  std::vector<double> psi;
  double max_excursion_over_theta0 = 0.0;  // validity diagnostic
  bool small_angle_valid = true;
  RotationalState final_state;  // p_theta = I theta_dot; p_phi/p_psi frozen
};
LinTrajectory integrate_linearized(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const FieldProtocol& protocol,
                                   const SpinBranch& branch,
                                   const TranslationalSolution& z_of_t,
                                   const RotationInit& rotation,
                                   const RotOptions& opt = {});

/// Adiabatic equilibrium tilt. exact=false uses the leading-order form.
double theta_bar(const PhysicalConstants& c, const ParticleParams& particle,
                 double B_c, int s, double omega0, double theta0,
                 bool exact = true);

/// Worst-case tilt mismatch at closure, 8 mu B0 theta0 / (I w0^2).
double delta_theta_bound(const PhysicalConstants& c,
                         const ParticleParams& particle, double B0,
                         double theta0, double omega0);

/// Quadrature of the small-angle precession/rotation rates from a theta(t)
/// series on a uniform grid.
struct PhiPsiSeries {
  std::vector<double> phi;
  std::vector<double> psi;
};
PhiPsiSeries accumulate_phi_psi(const std::vector<double>& t,
                                const std::vector<double>& theta,
                                double omega0, double theta0);

/// Equilibrium-tilt history of one arm on a uniform grid.
std::vector<double> theta_bar_series(const PhysicalConstants& c,
                                     const ParticleParams& particle,
                                     const FieldProtocol& protocol,
                                     const SpinBranch& branch,
                                     const TranslationalSolution& z_of_t,
                                     const RotationInit& rotation,
                                     const std::vector<double>& grid,
                                     bool exact = false);

struct DeltaPhiArea {
  double delta_phi = 0.0;
  double sigma_A = 0.0;  // positive-part area, rad s
  double sigma_B = 0.0;  // negative-part area, rad s
};
/// Precession mismatch via the equilibrium-tilt area route.
DeltaPhiArea delta_phi_area(const std::vector<double>& t,
                            const std::vector<double>& theta_bar_L,
                            const std::vector<double>& theta_bar_R,
                            double omega0, double theta0);

struct MismatchReport {
  double delta_theta = 0.0;        // rad, small-angle (linearized) route
  double delta_p_theta = 0.0;      // J s
  double delta_phi = 0.0;          // rad, small-angle (linearized) route
  double delta_psi = 0.0;          // rad, = -delta_phi by construction
  double delta_theta_full = 0.0;   // rad, full Euler-angle trajectories
  double delta_phi_full = 0.0;     // rad
  double delta_psi_full = 0.0;     // rad
  double delta_theta_bound = 0.0;  // rad
  double sigma_A_minus_sigma_B = 0.0;  // rad s
  double delta_phi_area = 0.0;     // rad (equilibrium-tilt area route)
};

}  // namespace sgi
