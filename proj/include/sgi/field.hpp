#pragma once

#include <array>
#include <cmath>

#include "sgi/common.hpp"

namespace sgi {

/// Piecewise time-staged field: gradient pull (stage 1), holding field
/// (stage 2), reversed gradient (stage 3). Stage intervals are half-open
/// [start, end): the value at tau1 / tau2 belongs to the following stage.
struct FieldProtocol {
  double B0 = 0.0;    // T
  double B1 = 0.0;    // T
  double eta = 0.0;   // T/m
  double tau1 = 0.0;  // s
  double tau2 = 0.0;  // s
  double tau3 = 0.0;  // s, spin-flip time
  double tau4 = 0.0;  // s, closure / measurement time

  double Z0() const { return B0 / eta; }

  void validate() const {
    if (!(B0 > 0.0)) throw ProtocolError("field: B0 must be > 0");
    if (!(B1 > 0.0)) throw ProtocolError("field: B1 must be > 0");
    if (!(eta > 0.0)) throw ProtocolError("field: eta must be > 0");
    if (!(0.0 < tau1 && tau1 < tau2 && tau2 < tau3 && tau3 < tau4))
      throw ProtocolError("field: need 0 < tau1 < tau2 < tau3 < tau4");
    if (!std::isfinite(Z0()) || !(Z0() > 0.0))
      throw ProtocolError("field: Z0 = B0/eta must be finite and positive");
  }
};

enum class FieldStage { Gradient1, Hold, Gradient2 };

inline FieldStage stage_of(const FieldProtocol& p, double t) {
  if (t < 0.0) throw std::domain_error("field: t must be >= 0");
  if (t < p.tau1) return FieldStage::Gradient1;
  if (t < p.tau2) return FieldStage::Hold;
  return FieldStage::Gradient2;
}

/// eta_tilde(t): -eta, 0, +eta across the three stages.
inline double gradient_sign(const FieldProtocol& p, double t) {
  switch (stage_of(p, t)) {
    case FieldStage::Gradient1: return -p.eta;
    case FieldStage::Hold: return 0.0;
    case FieldStage::Gradient2: return +p.eta;
  }
  return 0.0;
}

/// (B_z, B_x) at position (z, x).
inline std::array<double, 2> field_vector(const FieldProtocol& p, double t,
                                          double z, double x) {
  switch (stage_of(p, t)) {
    case FieldStage::Gradient1: return {p.B0 - p.eta * z, p.eta * x};
    case FieldStage::Hold: return {p.B1, 0.0};
    case FieldStage::Gradient2: return {-(p.B0 - p.eta * z), -p.eta * x};
  }
  return {0.0, 0.0};
}

/// Signed axial field on the x = 0 line.
inline double b_signed(const FieldProtocol& p, double t, double z) {
  return field_vector(p, t, z, 0.0)[0];
}

/// Field strength at the centre of mass (x = 0 line).
inline double b_com(const FieldProtocol& p, double t, double z) {
  return std::abs(b_signed(p, t, z));
}

/// Field strength at the NV site, offset d from the COM at body angle alpha.
inline double b_nv(double B_c, double eta_tilde, double theta, double psi,
                   double d, double alpha) {
  return B_c + eta_tilde * d *
                   (std::cos(alpha) * std::cos(theta) +
                    std::sin(theta) * std::sin(alpha) * std::cos(psi));
}

}  // namespace sgi
