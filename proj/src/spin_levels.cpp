#include "sgi/spin_levels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgi {

SpinHamiltonianParams SpinHamiltonianParams::from_physical(
    const PhysicalConstants& c, double B_field, double theta0, double omega0) {
  if (!(B_field >= 0.0))
    throw ParameterError("SpinHamiltonianParams: B must be >= 0");
  SpinHamiltonianParams p;
  const double muB = c.mu_nv * B_field;
  p.Delta_plus = c.D_zfs + muB * std::cos(theta0) - c.hbar * omega0;
  p.Delta_minus = c.D_zfs - muB * std::cos(theta0) + c.hbar * omega0;
  p.W = muB * std::sin(theta0) / std::sqrt(2.0);
  p.omega0 = omega0;
  return p;
}

Eigen::Matrix3cd build_spin_hamiltonian(double t,
                                        const SpinHamiltonianParams& params) {
  using namespace std::complex_literals;
  const std::complex<double> w_m = params.W * std::exp(-1i * params.omega0 * t);
  const std::complex<double> w_p = std::conj(w_m);
  Eigen::Matrix3cd H;
  H << params.Delta_plus, w_m, 0.0,  //
      w_p, 0.0, w_m,                 //
      0.0, w_p, params.Delta_minus;
  return H;
}

SpinSeries evolve_spin(const PhysicalConstants& c,
                       const SpinAmplitudes& initial,
                       const SpinHamiltonianParams& params, double t_end,
                       std::size_t n_samples) {
  using namespace std::complex_literals;
  if (std::abs(initial.norm2() - 1.0) > 1e-8)
    throw ParameterError("evolve_spin: initial state must be normalized");
  if (!(t_end > 0.0) || n_samples < 2)
    throw ParameterError("evolve_spin: need t_end > 0 and >= 2 samples");

  // Constant rotating-frame matrix; see the header note.
  const double hw = c.hbar * params.omega0;
  Eigen::Matrix3cd Ht;
  Ht << params.Delta_plus - hw, params.W, 0.0,  //
      params.W, 0.0, params.W,                  //
      0.0, params.W, params.Delta_minus + hw;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(Ht);
  if (eig.info() != Eigen::Success)
    throw NumericalError("evolve_spin: eigendecomposition failed");
  const Eigen::Vector3d lam = eig.eigenvalues();
  const Eigen::Matrix3cd V = eig.eigenvectors();

  const Eigen::Vector3cd psi0(initial.c_plus, initial.c_zero, initial.c_minus);
  const Eigen::Vector3cd a0 = V.adjoint() * psi0;

  double p0[3] = {std::norm(initial.c_plus), std::norm(initial.c_zero),
                  std::norm(initial.c_minus)};
  const int lead = int(std::max_element(p0, p0 + 3) - p0);

  SpinSeries out;
  out.initial_level = lead;
  out.t.reserve(n_samples);
  out.amplitudes.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = t_end * double(i) / double(n_samples - 1);
    Eigen::Vector3cd a = a0;
    for (int k = 0; k < 3; ++k)
      a[k] *= std::exp(-1i * lam[k] * t / c.hbar);
    Eigen::Vector3cd psi = V * a;
    // undo the frame rotation
    psi[0] *= std::exp(-1i * params.omega0 * t);
    psi[2] *= std::exp(1i * params.omega0 * t);

    SpinAmplitudes amp{psi[0], psi[1], psi[2]};
    out.max_norm_drift =
        std::max(out.max_norm_drift, std::abs(amp.norm2() - 1.0));
    out.max_transfer =
        std::max(out.max_transfer, 1.0 - std::norm(psi[lead]));
    out.t.push_back(t);
    out.amplitudes.push_back(amp);
  }
  out.final_state = out.amplitudes.back();
  if (out.max_norm_drift > 1e-8)
    throw NumericalError("evolve_spin: norm drift beyond tolerance");
  return out;
}

double off_resonance_margin(const SpinHamiltonianParams& params) {
  const double dmin =
      std::min(std::abs(params.Delta_plus), std::abs(params.Delta_minus));
  if (params.W == 0.0) return std::numeric_limits<double>::infinity();
  return dmin / params.W;
}

bool off_resonance_pass(const SpinHamiltonianParams& params, double factor) {
  return off_resonance_margin(params) >= factor;
}

double perturbative_transfer_bound(const SpinHamiltonianParams& params) {
  const double d =
      std::min(std::abs(params.Delta_plus), std::abs(params.Delta_minus));
  const double w2 = 4.0 * params.W * params.W;
  return w2 / (w2 + d * d);
}

Vec3 edh_torque(const PhysicalConstants& c, const ParticleParams& particle,
                const Vec3& s, const Vec3& L, const Vec3& B) {
  const double I = particle.moment_of_inertia();
  auto cross = [](const Vec3& a, const Vec3& b) {
    return Vec3{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0]};
  };
  const Vec3 zeeman = cross(B, s);   // eps_ijk B_j s_k
  const Vec3 edh = cross(s, L);      // eps_ijk s_j L_k
  Vec3 out;
  for (int i = 0; i < 3; ++i)
    out[i] = c.mu_nv * zeeman[i] + c.hbar * edh[i] / I;
  return out;
}

double edh_ratio(const PhysicalConstants& c, double omega0, double B_field) {
  if (!(B_field > 0.0)) throw ParameterError("edh_ratio: B must be > 0");
  return std::abs(c.hbar * omega0 / (c.mu_nv * B_field));
}

}  // namespace sgi
