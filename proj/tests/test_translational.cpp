// Spatial branch trajectories: closed form vs ODE, conservation, closure.

#include <cmath>

#include "doctest.h"
#include "sgi/translational.hpp"

using namespace sgi;

namespace {

PhysicalConstants constants;

ParticleParams reference_particle() {
  ParticleParams p;
  p.mass = 1e-17;
  return p;
}

FieldProtocol pm_protocol() {
  FieldProtocol p;
  p.B0 = units::gauss_to_tesla(100.0);
  p.B1 = units::gauss_to_tesla(1.0);
  p.eta = units::gauss_per_um_to_tesla_per_m(0.45);
  p.tau1 = 0.482;
  p.tau2 = 0.514;
  p.tau3 = 0.8022;
  p.tau4 = 1.320;
  return p;
}

FieldProtocol zm_protocol() {
  auto p = pm_protocol();
  p.tau1 = 0.494;
  p.tau2 = 0.513;
  p.tau3 = 0.800;
  p.tau4 = 1.314;
  return p;
}

}  // namespace

TEST_CASE("diamagnetic trap frequency at the reference gradient") {
  // 0.45 G/um -> Omega = sqrt(-chi_rho/mu0) * 45 T/m ~ 3.16 rad/s
  CHECK(trap_frequency(constants, 45.0) == doctest::Approx(3.16).epsilon(3e-3));
  CHECK(trap_frequency(constants, -45.0) ==
        doctest::Approx(trap_frequency(constants, 45.0)));
  CHECK(trap_frequency(constants, 90.0) ==
        doctest::Approx(2.0 * trap_frequency(constants, 45.0)));
  CHECK(trap_frequency(constants, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("equilibrium superposition size") {
  // 2 mu0 mu / (-chi_rho m eta) ~ 1.67e-5 m for the reference particle
  const auto p = reference_particle();
  CHECK(superposition_size_eq(constants, p, 45.0) ==
        doctest::Approx(1.67e-5).epsilon(5e-3));
  CHECK(superposition_size_eq(constants, p, 90.0) ==
        doctest::Approx(0.5 * superposition_size_eq(constants, p, 45.0)));
}

TEST_CASE("closed form and ODE path agree to 1e-11 m") {
  const auto particle = reference_particle();
  const auto proto = pm_protocol();
  const auto arms = SpinBranch::pm_pair();
  for (const auto& arm : {arms.first, arms.second}) {
    const auto closed = evolve_branch_closed(constants, particle, proto, arm);
    const auto ode = evolve_branch_ode(constants, particle, proto, arm,
                                       nullptr, 1e-12, 1e-20, 1e-3);
    double max_dz = 0.0;
    for (std::size_t i = 0; i < ode.t.size(); ++i)
      max_dz = std::max(max_dz, std::abs(ode.z[i] - closed.z(ode.t[i])));
    CHECK(max_dz < 1e-11);
  }
}

TEST_CASE("s = 0 branch oscillates about Z0, not about the origin") {
  const auto particle = reference_particle();
  const auto proto = zm_protocol();
  const SpinBranch zero{0, 0, ArmLabel::R};
  const auto sol = evolve_branch_closed(constants, particle, proto, zero);
  const double Z0 = proto.Z0();
  const double W = trap_frequency(constants, proto.eta);
  // stage 1: z(t) = Z0 (1 - cos W t)
  for (double t : {0.1, 0.25, 0.4}) {
    CHECK(sol.z(t) ==
          doctest::Approx(Z0 * (1.0 - std::cos(W * t))).epsilon(1e-10));
  }
  CHECK(sol.z(0.0) == doctest::Approx(0.0));
  CHECK(std::abs(sol.eval(0.0).p_z) < 1e-30);
}

TEST_CASE("branch mirror symmetry about the s = 0 trajectory") {
  const auto particle = reference_particle();
  const auto proto = pm_protocol();
  const SpinBranch plus{+1, -1, ArmLabel::L};
  const SpinBranch minus{-1, +1, ArmLabel::R};
  const SpinBranch zero{0, 0, ArmLabel::L};
  const auto sp = evolve_branch_closed(constants, particle, proto, plus);
  const auto sm = evolve_branch_closed(constants, particle, proto, minus);
  const auto s0 = evolve_branch_closed(constants, particle, proto, zero);
  for (double t = 0.0; t <= proto.tau4; t += 0.05) {
    CHECK(sp.z(t) + sm.z(t) == doctest::Approx(2.0 * s0.z(t)).epsilon(1e-10));
  }
}

TEST_CASE("stage-wise energy conservation of the closed form") {
  const auto particle = reference_particle();
  const auto proto = pm_protocol();
  const double m = particle.mass;
  const auto arms = SpinBranch::pm_pair();
  for (const auto& arm : {arms.first, arms.second}) {
    const auto sol = evolve_branch_closed(constants, particle, proto, arm);
    const double edges[5] = {0.0, proto.tau1, proto.tau2, proto.tau3,
                             proto.tau4};
    for (int k = 0; k < 4; ++k) {
      const double eta_t = gradient_sign(proto, edges[k]);
      const int s = arm.s_at(edges[k], proto.tau3);
      auto energy = [&](double t) {
        const auto st = sol.eval(t);
        const double w = trap_frequency(constants, eta_t);
        const double dz = st.z - proto.Z0();
        return st.p_z * st.p_z / (2.0 * m) + 0.5 * m * w * w * dz * dz +
               eta_t * constants.mu_nv * s * dz;
      };
      const double t_a = edges[k] + 1e-9;
      const double t_b = edges[k + 1] - 1e-9;
      const double Ea = energy(t_a), Eb = energy(t_b);
      const double scale = std::max({std::abs(Ea), std::abs(Eb), 1e-30});
      CHECK(std::abs(Ea - Eb) / scale < 1e-8);
    }
  }
}

TEST_CASE("closure solver reproduces the reference stage times (pm scheme)") {
  const auto particle = reference_particle();
  auto proto = pm_protocol();
  // perturb the guesses; the solver must come back to the published times
  proto.tau3 *= 1.02;
  proto.tau4 *= 0.98;
  const auto res = close_interferometer(constants, particle, proto,
                                        SpinBranch::pm_pair());
  CHECK(res.converged);
  CHECK(std::abs(res.residual_z) <= 1e-9);
  CHECK(std::abs(res.residual_p) / particle.mass <= 1e-9);
  CHECK(res.protocol.tau3 == doctest::Approx(0.8022).epsilon(0.10));
  CHECK(res.protocol.tau4 == doctest::Approx(1.320).epsilon(0.10));
}

TEST_CASE("closure solver reproduces the reference stage times (0/-1 scheme)") {
  const auto particle = reference_particle();
  auto proto = zm_protocol();
  proto.tau3 *= 0.97;
  proto.tau4 *= 1.03;
  const auto res = close_interferometer(constants, particle, proto,
                                        SpinBranch::zm_pair());
  CHECK(res.converged);
  CHECK(std::abs(res.residual_z) <= 1e-9);
  CHECK(std::abs(res.residual_p) / particle.mass <= 1e-9);
  CHECK(res.protocol.tau3 == doctest::Approx(0.800).epsilon(0.10));
  CHECK(res.protocol.tau4 == doctest::Approx(1.314).epsilon(0.10));
}

TEST_CASE("identical branches close with zero residual at any tau4") {
  const auto particle = reference_particle();
  const auto proto = pm_protocol();
  const SpinBranch same{+1, -1, ArmLabel::L};
  const auto a = evolve_branch_closed(constants, particle, proto, same);
  const auto b = evolve_branch_closed(constants, particle, proto, same);
  CHECK(a.z(proto.tau4) == doctest::Approx(b.z(proto.tau4)));
  CHECK(a.eval(proto.tau4).p_z == doctest::Approx(b.eval(proto.tau4).p_z));
}

TEST_CASE("maximum separation lies between 1x and 2x the equilibrium size") {
  const auto particle = reference_particle();
  const auto proto = pm_protocol();
  const auto arms = SpinBranch::pm_pair();
  const auto sL = evolve_branch_closed(constants, particle, proto, arms.first);
  const auto sR = evolve_branch_closed(constants, particle, proto, arms.second);
  double max_sep = 0.0;
  for (double t = 0.0; t <= proto.tau4; t += 1e-3)
    max_sep = std::max(max_sep, std::abs(sL.z(t) - sR.z(t)));
  const double eq = superposition_size_eq(constants, particle, proto.eta);
  CHECK(max_sep >= eq);
  CHECK(max_sep <= 2.0 * eq);
}
