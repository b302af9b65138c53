#pragma once

#include <cmath>
#include <numbers>

#include "sgi/common.hpp"

namespace sgi {

/// Inertia of a homogeneous sphere of the given mass and density.
double derive_inertia(double mass, double density);

/// Radius of the equivalent homogeneous sphere.
double sphere_radius(double mass, double density);

struct ParticleParams {
  double mass = 0.0;                // kg
  double density = 3500.0;          // kg/m^3, used only if inertia not given
  double inertia = 0.0;             // kg m^2; 0 means derive from sphere
  double nv_offset_d = 0.0;         // m, NV distance from the centre of mass
  double nv_angle_alpha = 0.0;      // rad, angle between n3 and the NV offset

  double moment_of_inertia() const {
    return inertia > 0.0 ? inertia : derive_inertia(mass, density);
  }

  void validate() const;
};

struct RotationInit {
  double omega0 = 0.0;   // rad/s, initial spin about n3
  double theta0 = 0.0;   // rad, initial tilt between n3 and z

  void validate() const;
  /// Tilt above this value leaves the small-angle regime the analysis assumes.
  bool theta0_small() const { return theta0 <= 0.1; }
};

struct QuantumInit {
  double dp_phi = 0.0;       // J s
  double dp_psi = 0.0;       // J s
  double occupation_n = 0.0; // thermal occupation, k_B T / (hbar omega0)

  /// Default construction ties the phi width to the psi width.
  static QuantumInit from_dp_psi(double dp_psi, double theta0, double n = 0.0) {
    QuantumInit q;
    q.dp_psi = dp_psi;
    q.dp_phi = dp_psi * std::cos(theta0);
    q.occupation_n = n;
    return q;
  }

  void validate() const;
};

/// Operating-regime check: a report, never an exception. Failures are flags.
struct RegimeReport {
  double omega0 = 0.0;          // rad/s
  double omega_low = 0.0;       // sqrt(mu B0 / I), rad/s
  double omega_larmor = 0.0;    // mu B0 / hbar, rad/s
  double omega_zfs_plus = 0.0;  // (D + mu B0)/hbar, rad/s
  double omega_zfs_minus = 0.0; // (D - mu B0)/hbar, rad/s
  double separation = 10.0;     // required scale separation R

  double margin_lower = 0.0;    // omega0 / omega_low
  double margin_upper = 0.0;    // omega_larmor / omega0
  double margin_zfs = 0.0;      // omega_zfs_minus / omega0

  bool pass_lower = false;
  bool pass_upper = false;
  bool pass_zfs = false;
  bool pass() const { return pass_lower && pass_upper && pass_zfs; }
};

RegimeReport validate_regime(const PhysicalConstants& c,
                             const ParticleParams& particle,
                             const RotationInit& rotation, double B0,
                             double separation = 10.0);

}  // namespace sgi
