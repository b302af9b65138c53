#pragma once

#include <complex>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/params.hpp"

namespace sgi {

/// Dimensionless phase-space coordinate of the tilt mode,
/// X = sqrt(I w0 / 2 hbar) theta.
double phase_space_scale(const PhysicalConstants& c, double inertia,
                         double omega0);

/// exp[-1/2 |alpha_L - (alpha_R + delta_X)|^2].
double coherent_overlap(std::complex<double> alpha_L,
                        std::complex<double> alpha_R, double delta_X);

/// delta_X = sqrt(I w0 / 2 hbar) * 2 mu B_c(tau4) theta0 / (I w0^2): the
/// residual displacement between the two arms' tilt coherent states.
double delta_x(const PhysicalConstants& c, const ParticleParams& particle,
               double B_c_tau4, double theta0, double omega0);

struct ContrastInputs {
  double delta_phi = 0.0;   // rad, precession mismatch at tau4
  double delta_psi = 0.0;   // rad, spin-axis rotation mismatch at tau4
  double dp_phi = 0.0;      // J s, initial p_phi width
  double dp_psi = 0.0;      // J s, initial p_psi width
  double B0 = 0.0;          // T
  double theta0 = 0.0;      // rad
  double omega0 = 0.0;      // rad/s
  double occupation_n = 0.0;
};

struct ContrastReport {
  double delta_phi = 0.0;
  double delta_psi = 0.0;
  double dp_phi = 0.0;
  double dp_psi = 0.0;
  double third_term_exponent = 0.0;  // 16 mu^2 B0^2 theta0^2 / (hbar I w0^3)
  double contrast_zero_T = 0.0;
  double contrast_thermal = 0.0;
  double contrast_integral = 0.0;  // quadrature form of the same bound
  double occupation_n = 0.0;
};

/// Lower bound on the final spin contrast:
/// exp(-1/2 dphi^2 Dp_phi^2/hbar^2 - 1/2 dpsi^2 Dp_psi^2/hbar^2 - third term),
/// with the thermal variant multiplying the third term by (1 + 2n).
/// contrast_integral evaluates the underlying Gaussian momentum integral by
/// quadrature instead of the closed form.
ContrastReport gyro_contrast_bound(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const ContrastInputs& in);

/// Zero-T bound with the displacement exponent scaled by (1 + 2n).
double thermal_contrast_bound(const PhysicalConstants& c,
                              const ParticleParams& particle,
                              const ContrastInputs& in, double n);

struct ContrastCurvePoint {
  double omega0_rad_s = 0.0;
  double omega0_hz = 0.0;
  double delta_phi = 0.0;
  std::vector<double> contrast;  // one value per (dp, n) family member
};

struct ContrastFamily {
  double dp_phi = 0.0;  // J s
  double dp_psi = 0.0;  // J s
  double n = 0.0;
};

/// Contrast-vs-omega0 table. delta_phi at each grid point is scaled from the
/// anchor as delta_phi_anchor * (omega0_anchor / omega0); delta_psi likewise.
std::vector<ContrastCurvePoint> contrast_vs_omega0_curve(
    const PhysicalConstants& c, const ParticleParams& particle,
    const ContrastInputs& anchor, const std::vector<double>& omega0_grid,
    const std::vector<ContrastFamily>& families);

}  // namespace sgi
