#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/field.hpp"
#include "sgi/params.hpp"

namespace sgi {

enum class ArmLabel { L, R };

/// One interferometer arm's spin history: s before and after the flip at tau3.
struct SpinBranch {
  int s_initial = 0;
  int s_after_flip = 0;
  ArmLabel label = ArmLabel::L;

  int s_at(double t, double tau3) const {
    return t < tau3 ? s_initial : s_after_flip;
  }

  /// |+1>, |-1> pair (gyroscopic scheme).
  static std::pair<SpinBranch, SpinBranch> pm_pair() {
    return {SpinBranch{+1, -1, ArmLabel::L}, SpinBranch{-1, +1, ArmLabel::R}};
  }
  /// |-1>, |0> pair (static scheme; the s=-1 arm is labelled L).
  static std::pair<SpinBranch, SpinBranch> zm_pair() {
    return {SpinBranch{-1, 0, ArmLabel::L}, SpinBranch{0, -1, ArmLabel::R}};
  }
};

struct TranslationalState {
  double z = 0.0;    // m
  double p_z = 0.0;  // kg m/s
  double t = 0.0;    // s
};

/// Diamagnetic trap frequency Omega = sqrt(-chi_rho/mu0) |eta_tilde|.
double trap_frequency(const PhysicalConstants& c, double eta_tilde);

/// Equilibrium separation between the s=+1 and s=-1 branches,
/// 2 mu0 mu / (-chi_rho m eta).
double superposition_size_eq(const PhysicalConstants& c,
                             const ParticleParams& particle, double eta);

/// Closed-form piecewise solution: harmonic in the gradient stages, ballistic
/// in the hold stage. Evaluable at any t in [0, tau4] (and slightly beyond).
class TranslationalSolution {
 public:
  struct Piece {
    double t0, t1;    // [t0, t1)
    double omega;     // 0 for ballistic
    double z_eq;      // centre of harmonic motion (unused when omega == 0)
    double z0, p0;    // state at t0
  };

  TranslationalSolution(std::vector<Piece> pieces, double mass)
      : pieces_(std::move(pieces)), mass_(mass) {}

  TranslationalState eval(double t) const;
  double z(double t) const { return eval(t).z; }
  double mass() const { return mass_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  std::vector<Piece> pieces_;
  double mass_;
};

/// Closed-form evolution of one arm under the effective 1D Hamiltonian,
/// starting from rest at the origin. Assumes cos(theta) ~ 1 in the spin force.
TranslationalSolution evolve_branch_closed(const PhysicalConstants& c,
                                           const ParticleParams& particle,
                                           const FieldProtocol& protocol,
                                           const SpinBranch& branch);

/// ODE evolution with an optional tilt coupling cos(theta(t)) in the spin
/// force. theta_of_t == nullptr reproduces the closed-form path.
struct TranslationalOde {
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> p_z;
  TranslationalState final_state;
};
TranslationalOde evolve_branch_ode(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const FieldProtocol& protocol,
                                   const SpinBranch& branch,
                                   const std::function<double(double)>& theta_of_t,
                                   double rel_tol = 1e-10, double abs_tol = 1e-14,
                                   double sample_dt = 1e-3);

struct ClosureResult {
  FieldProtocol protocol;
  double residual_z = 0.0;  // m
  double residual_p = 0.0;  // kg m/s
  int iterations = 0;
  bool converged = false;
};

/// Root-finds (tau3, tau4) so both arms meet in position and momentum at tau4.
/// tau1, tau2 are taken from the template. Throws ClosureError on failure.
ClosureResult close_interferometer(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const FieldProtocol& protocol_template,
                                   const std::pair<SpinBranch, SpinBranch>& arms,
                                   double tol_z = 1e-9, double tol_p = -1.0);

}  // namespace sgi
