#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sgi/common.hpp"
#include "sgi/params.hpp"

namespace sgi {

/// Effective three-level NV Hamiltonian parameters in the frame co-rotating
/// with the particle.
struct SpinHamiltonianParams {
  double Delta_plus = 0.0;   // J
  double Delta_minus = 0.0;  // J
  double W = 0.0;            // J
  double omega0 = 0.0;       // rad/s

  /// Delta_pm = D +- mu B cos(theta0) -+ hbar w0, W = mu B sin(theta0)/sqrt 2.
  static SpinHamiltonianParams from_physical(const PhysicalConstants& c,
                                             double B_field, double theta0,
                                             double omega0);
};

/// Amplitudes in the lab basis {s3 = +1, 0, -1}.
struct SpinAmplitudes {
  std::complex<double> c_plus{0.0, 0.0};
  std::complex<double> c_zero{0.0, 0.0};
  std::complex<double> c_minus{0.0, 0.0};

  double norm2() const {
    return std::norm(c_plus) + std::norm(c_zero) + std::norm(c_minus);
  }
};

/// H(t) = [[D+, W e^{-i w0 t}, 0], [W e^{i w0 t}, 0, W e^{-i w0 t}],
///         [0, W e^{i w0 t}, D-]].
Eigen::Matrix3cd build_spin_hamiltonian(double t,
                                        const SpinHamiltonianParams& params);

struct SpinSeries {
  std::vector<double> t;
  std::vector<SpinAmplitudes> amplitudes;
  SpinAmplitudes final_state;
  double max_norm_drift = 0.0;     // max |norm - 1| along the run
  double max_transfer = 0.0;       // max population outside the initial level
  int initial_level = 0;           // index 0,1,2 of the dominant initial level
};

/// Unitary evolution of the three-level system over [0, t_end].
/// Internally the oscillating off-diagonals are removed by the rotating-frame
/// substitution c~_1 = e^{i w0 t} c_1, c~_3 = e^{-i w0 t} c_3, which leaves a
/// constant Hermitian matrix; one eigendecomposition then gives the exact
/// propagator at every output time.
SpinSeries evolve_spin(const PhysicalConstants& c,
                       const SpinAmplitudes& initial,
                       const SpinHamiltonianParams& params, double t_end,
                       std::size_t n_samples = 1000);

/// min(|Delta+|, |Delta-|) / W. Infinity when W = 0.
double off_resonance_margin(const SpinHamiltonianParams& params);

/// PASS when the margin is at least `factor` (default 1e3).
bool off_resonance_pass(const SpinHamiltonianParams& params,
                        double factor = 1e3);

/// Perturbative two-level transfer bound 4W^2/(4W^2 + Delta^2) for the
/// closer of the two sidebands.
double perturbative_transfer_bound(const SpinHamiltonianParams& params);

using Vec3 = std::array<double, 3>;

/// Torque on the angular momentum: eps_ijk (mu B_j s_k + hbar s_j L_k / I).
/// Valid for a spherical particle where the L x L term vanishes.
Vec3 edh_torque(const PhysicalConstants& c, const ParticleParams& particle,
                const Vec3& s_vector, const Vec3& L_vector,
                const Vec3& B_vector);

/// |hbar w0 / (mu B)|: the size of the Einstein-de Haas term relative to the
/// Zeeman torque.
double edh_ratio(const PhysicalConstants& c, double omega0, double B_field);

}  // namespace sgi
