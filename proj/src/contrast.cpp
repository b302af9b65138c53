#include "sgi/contrast.hpp"

#include <cmath>

namespace sgi {

double phase_space_scale(const PhysicalConstants& c, double inertia,
                         double omega0) {
  if (!(omega0 > 0.0))
    throw ParameterError("phase_space_scale: omega0 must be > 0");
  return std::sqrt(inertia * omega0 / (2.0 * c.hbar));
}

double coherent_overlap(std::complex<double> alpha_L,
                        std::complex<double> alpha_R, double delta_X) {
  const double dist = std::abs(alpha_L - (alpha_R + delta_X));
  return std::exp(-0.5 * dist * dist);
}

double delta_x(const PhysicalConstants& c, const ParticleParams& particle,
               double B_c_tau4, double theta0, double omega0) {
  const double I = particle.moment_of_inertia();
  const double dtheta = 2.0 * c.mu_nv * B_c_tau4 * theta0 / (I * omega0 * omega0);
  return phase_space_scale(c, I, omega0) * dtheta;
}

namespace {

double third_term(const PhysicalConstants& c, double inertia, double B0,
                  double theta0, double omega0) {
  const double muB = c.mu_nv * B0;
  return 16.0 * muB * muB * theta0 * theta0 /
         (c.hbar * inertia * omega0 * omega0 * omega0);
}

// |integral of a unit Gaussian of width dp in momentum against
// exp(i delta p / hbar)|, evaluated by midpoint quadrature over +-10 dp.
double gaussian_phase_integral(double delta, double dp, double hbar) {
  if (dp <= 0.0 || delta == 0.0) return 1.0;
  const int n = 4001;
  const double lim = 10.0 * dp;
  const double h = 2.0 * lim / n;
  std::complex<double> acc{0.0, 0.0};
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * dp);
  for (int i = 0; i < n; ++i) {
    const double p = -lim + (i + 0.5) * h;
    const double w = norm * std::exp(-0.5 * p * p / (dp * dp));
    acc += w * std::exp(std::complex<double>(0.0, delta * p / hbar));
  }
  return std::abs(acc) * h;
}

}  // namespace

ContrastReport gyro_contrast_bound(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const ContrastInputs& in) {
  if (!(in.omega0 > 0.0))
    throw ParameterError("gyro_contrast_bound: omega0 must be > 0");
  if (in.occupation_n < 0.0)
    throw ParameterError("gyro_contrast_bound: n must be >= 0");
  const double I = particle.moment_of_inertia();
  ContrastReport r;
  r.delta_phi = in.delta_phi;
  r.delta_psi = in.delta_psi;
  r.dp_phi = in.dp_phi;
  r.dp_psi = in.dp_psi;
  r.occupation_n = in.occupation_n;
  r.third_term_exponent = third_term(c, I, in.B0, in.theta0, in.omega0);

  const double h2 = c.hbar * c.hbar;
  const double e_phi = 0.5 * in.delta_phi * in.delta_phi * in.dp_phi * in.dp_phi / h2;
  const double e_psi = 0.5 * in.delta_psi * in.delta_psi * in.dp_psi * in.dp_psi / h2;
  r.contrast_zero_T = std::exp(-e_phi - e_psi - r.third_term_exponent);
  r.contrast_thermal = std::exp(
      -e_phi - e_psi - (1.0 + 2.0 * in.occupation_n) * r.third_term_exponent);

  // quadrature form of the Gaussian momentum integrals, same displacement
  // factor
  r.contrast_integral =
      gaussian_phase_integral(in.delta_phi, in.dp_phi, c.hbar) *
      gaussian_phase_integral(in.delta_psi, in.dp_psi, c.hbar) *
      std::exp(-r.third_term_exponent);
  return r;
}

double thermal_contrast_bound(const PhysicalConstants& c,
                              const ParticleParams& particle,
                              const ContrastInputs& in, double n) {
  ContrastInputs tmp = in;
  tmp.occupation_n = n;
  return gyro_contrast_bound(c, particle, tmp).contrast_thermal;
}

std::vector<ContrastCurvePoint> contrast_vs_omega0_curve(
    const PhysicalConstants& c, const ParticleParams& particle,
    const ContrastInputs& anchor, const std::vector<double>& omega0_grid,
    const std::vector<ContrastFamily>& families) {
  if (!(anchor.omega0 > 0.0))
    throw ParameterError("contrast_vs_omega0_curve: anchor omega0 must be > 0");
  std::vector<ContrastCurvePoint> out;
  out.reserve(omega0_grid.size());
  for (double w : omega0_grid) {
    if (!(w > 0.0))
      throw ParameterError("contrast_vs_omega0_curve: omega0 grid must be > 0");
    ContrastCurvePoint pt;
    pt.omega0_rad_s = w;
    pt.omega0_hz = units::rad_s_to_hz(w);
    const double scale = anchor.omega0 / w;
    pt.delta_phi = anchor.delta_phi * scale;
    for (const auto& fam : families) {
      ContrastInputs in = anchor;
      in.omega0 = w;
      in.delta_phi = anchor.delta_phi * scale;
      in.delta_psi = anchor.delta_psi * scale;
      in.dp_phi = fam.dp_phi;
      in.dp_psi = fam.dp_psi;
      in.occupation_n = fam.n;
      pt.contrast.push_back(gyro_contrast_bound(c, particle, in).contrast_thermal);
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace sgi
