// Units, particle parameters, field protocol, and the staged field map.

#include <cmath>

#include "doctest.h"
#include "sgi/field.hpp"
#include "sgi/params.hpp"

using namespace sgi;

TEST_CASE("unit conversions round-trip") {
  CHECK(units::gauss_to_tesla(100.0) == doctest::Approx(0.01));
  CHECK(units::tesla_to_gauss(units::gauss_to_tesla(3.7)) ==
        doctest::Approx(3.7));
  CHECK(units::gauss_per_um_to_tesla_per_m(0.45) == doctest::Approx(45.0));
  CHECK(units::nm_to_m(10.0) == doctest::Approx(1e-8));
  CHECK(units::hz_to_rad_s(1.0) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(units::rad_s_to_hz(units::hz_to_rad_s(123.0)) ==
        doctest::Approx(123.0));
}

TEST_CASE("sphere inertia for the reference particle") {
  // m = 1e-17 kg, diamond density 3500 kg/m^3 -> I = (2/5) m r^2 ~ 3.1e-32
  const double I = derive_inertia(1e-17, 3500.0);
  CHECK(I == doctest::Approx(3.1e-32).epsilon(0.02));
  const double r = sphere_radius(1e-17, 3500.0);
  CHECK(I == doctest::Approx(0.4 * 1e-17 * r * r).epsilon(1e-12));
  CHECK_THROWS_AS(derive_inertia(-1.0, 3500.0), ParameterError);
  CHECK_THROWS_AS(derive_inertia(1e-17, 0.0), ParameterError);
}

TEST_CASE("explicit inertia overrides the sphere value") {
  ParticleParams p;
  p.mass = 1e-17;
  p.inertia = 5e-32;
  CHECK(p.moment_of_inertia() == doctest::Approx(5e-32));
  p.inertia = 0.0;
  CHECK(p.moment_of_inertia() == doctest::Approx(derive_inertia(1e-17, p.density)));
}

TEST_CASE("quantum widths tie phi to psi through cos(theta0)") {
  PhysicalConstants c;
  const auto q = QuantumInit::from_dp_psi(c.hbar, 0.01, 20.0);
  CHECK(q.dp_psi == doctest::Approx(c.hbar));
  CHECK(q.dp_phi == doctest::Approx(c.hbar * std::cos(0.01)));
  CHECK(q.occupation_n == doctest::Approx(20.0));
}

namespace {
FieldProtocol reference_protocol() {
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
}  // namespace

TEST_CASE("field stages are half-open on the left edge") {
  const auto p = reference_protocol();
  CHECK(stage_of(p, 0.0) == FieldStage::Gradient1);
  CHECK(stage_of(p, p.tau1 - 1e-12) == FieldStage::Gradient1);
  CHECK(stage_of(p, p.tau1) == FieldStage::Hold);
  CHECK(stage_of(p, p.tau2 - 1e-12) == FieldStage::Hold);
  CHECK(stage_of(p, p.tau2) == FieldStage::Gradient2);
  CHECK(stage_of(p, p.tau4) == FieldStage::Gradient2);
  CHECK_THROWS(stage_of(p, -1e-9));
}

TEST_CASE("gradient schedule is -eta, 0, +eta") {
  const auto p = reference_protocol();
  CHECK(gradient_sign(p, 0.1) == doctest::Approx(-p.eta));
  CHECK(gradient_sign(p, 0.5) == doctest::Approx(0.0));
  CHECK(gradient_sign(p, 1.0) == doctest::Approx(+p.eta));
}

TEST_CASE("field at the centre of mass") {
  const auto p = reference_protocol();
  // stage 1 at the origin: B0
  CHECK(b_com(p, 0.0, 0.0) == doctest::Approx(p.B0));
  // hold stage: uniform B1 regardless of position
  CHECK(b_com(p, 0.5, 1e-4) == doctest::Approx(p.B1));
  // stage 3 is the reversed field; magnitude at the origin is still B0
  CHECK(b_com(p, 1.0, 0.0) == doctest::Approx(p.B0));
  CHECK(b_signed(p, 1.0, 0.0) == doctest::Approx(-p.B0));
  // the field vanishes at Z0 = B0/eta in both gradient stages
  CHECK(b_com(p, 0.0, p.Z0()) == doctest::Approx(0.0));
  CHECK(b_com(p, 1.0, p.Z0()) == doctest::Approx(0.0));
}

TEST_CASE("NV-site field reduces to the COM field when d = 0") {
  CHECK(b_nv(0.01, 45.0, 0.3, 1.2, 0.0, 0.5) == doctest::Approx(0.01));
  // theta = 0: offset contribution is eta d cos(alpha)
  const double a = 0.5, d = 1e-8;
  CHECK(b_nv(0.01, 45.0, 0.0, 0.0, d, a) ==
        doctest::Approx(0.01 + 45.0 * d * std::cos(a)));
}

TEST_CASE("protocol validation rejects non-monotone stage times") {
  auto p = reference_protocol();
  CHECK_NOTHROW(p.validate());
  p.tau2 = p.tau1;
  CHECK_THROWS_AS(p.validate(), ProtocolError);
  p = reference_protocol();
  p.B0 = 0.0;
  CHECK_THROWS_AS(p.validate(), ProtocolError);
}
