#include "sgi/params.hpp"

#include <cmath>
#include <numbers>

namespace sgi {

double sphere_radius(double mass, double density) {
  if (!(mass > 0.0)) throw ParameterError("sphere_radius: mass must be > 0");
  if (!(density > 0.0)) throw ParameterError("sphere_radius: density must be > 0");
  return std::cbrt(3.0 * mass / (4.0 * std::numbers::pi * density));
}

double derive_inertia(double mass, double density) {
  const double r = sphere_radius(mass, density);
  return 0.4 * mass * r * r;
}

void ParticleParams::validate() const {
  if (!(mass > 0.0)) throw ParameterError("particle: mass must be > 0");
  if (inertia <= 0.0 && !(density > 0.0))
    throw ParameterError("particle: density must be > 0 when inertia is derived");
  if (!(moment_of_inertia() > 0.0))
    throw ParameterError("particle: inertia must be > 0");
  if (nv_offset_d < 0.0)
    throw ParameterError("particle: nv_offset_d must be >= 0");
  if (nv_angle_alpha < 0.0 || nv_angle_alpha > std::numbers::pi)
    throw ParameterError("particle: nv_angle_alpha must lie in [0, pi]");
}

void RotationInit::validate() const {
  if (omega0 < 0.0) throw ParameterError("rotation: omega0 must be >= 0");
  if (theta0 < 0.0) throw ParameterError("rotation: theta0 must be >= 0");
}

void QuantumInit::validate() const {
  if (!(dp_psi > 0.0)) throw ParameterError("quantum: dp_psi must be > 0");
  if (!(dp_phi > 0.0)) throw ParameterError("quantum: dp_phi must be > 0");
  if (occupation_n < 0.0)
    throw ParameterError("quantum: occupation_n must be >= 0");
}

RegimeReport validate_regime(const PhysicalConstants& c,
                             const ParticleParams& particle,
                             const RotationInit& rotation, double B0,
                             double separation) {
  const double I = particle.moment_of_inertia();
  RegimeReport r;
  r.omega0 = rotation.omega0;
  r.separation = separation;
  r.omega_low = std::sqrt(c.mu_nv * B0 / I);
  r.omega_larmor = c.mu_nv * B0 / c.hbar;
  r.omega_zfs_plus = (c.D_zfs + c.mu_nv * B0) / c.hbar;
  r.omega_zfs_minus = (c.D_zfs - c.mu_nv * B0) / c.hbar;

  r.margin_lower = r.omega_low > 0.0 ? r.omega0 / r.omega_low : 0.0;
  r.margin_upper = r.omega0 > 0.0 ? r.omega_larmor / r.omega0 : 0.0;
  r.margin_zfs = r.omega0 > 0.0 ? r.omega_zfs_minus / r.omega0 : 0.0;

  r.pass_lower = r.omega0 >= separation * r.omega_low;
  r.pass_upper = r.omega0 <= r.omega_larmor / separation;
  r.pass_zfs = r.omega0 <= r.omega_zfs_minus / separation;
  return r;
}

}  // namespace sgi
