#include "sgi/translational.hpp"

#include <cmath>

#include "sgi/ode.hpp"

namespace sgi {

double trap_frequency(const PhysicalConstants& c, double eta_tilde) {
  return std::sqrt(-c.chi_rho / c.mu0) * std::abs(eta_tilde);
}

double superposition_size_eq(const PhysicalConstants& c,
                             const ParticleParams& particle, double eta) {
  if (!(eta > 0.0)) throw ParameterError("superposition_size_eq: eta must be > 0");
  return 2.0 * c.mu0 * c.mu_nv / (-c.chi_rho * particle.mass * eta);
}

TranslationalState TranslationalSolution::eval(double t) const {
  const Piece* piece = &pieces_.back();
  for (const auto& p : pieces_) {
    if (t < p.t1) {
      piece = &p;
      break;
    }
  }
  const double dt = t - piece->t0;
  TranslationalState s;
  s.t = t;
  if (piece->omega == 0.0) {
    s.z = piece->z0 + piece->p0 / mass_ * dt;
    s.p_z = piece->p0;
  } else {
    const double w = piece->omega;
    const double cw = std::cos(w * dt);
    const double sw = std::sin(w * dt);
    const double dz = piece->z0 - piece->z_eq;
    s.z = piece->z_eq + dz * cw + piece->p0 / (mass_ * w) * sw;
    s.p_z = -mass_ * w * dz * sw + piece->p0 * cw;
  }
  return s;
}

TranslationalSolution evolve_branch_closed(const PhysicalConstants& c,
                                           const ParticleParams& particle,
                                           const FieldProtocol& protocol,
                                           const SpinBranch& branch) {
  protocol.validate();
  particle.validate();
  const double m = particle.mass;
  const double Z0 = protocol.Z0();

  // stage boundaries plus the spin flip at tau3
  const double edges[5] = {0.0, protocol.tau1, protocol.tau2, protocol.tau3,
                           protocol.tau4};
  std::vector<TranslationalSolution::Piece> pieces;
  double z = 0.0, p = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double t0 = edges[k], t1 = edges[k + 1];
    const double eta_t = gradient_sign(protocol, t0);
    const int s = branch.s_at(t0, protocol.tau3);
    TranslationalSolution::Piece piece;
    piece.t0 = t0;
    piece.t1 = t1;
    piece.z0 = z;
    piece.p0 = p;
    if (eta_t == 0.0) {
      piece.omega = 0.0;
      piece.z_eq = 0.0;
    } else {
      const double w = trap_frequency(c, eta_t);
      piece.omega = w;
      // H = p^2/2m + (m w^2/2)(z - Z0)^2 + eta_t mu s (z - Z0),
      // i.e. the staged Zeeman term of the full Hamiltonian; spin force
      // -mu s eta_t, equilibrium below Z0 for s = -1 in stage 1.
      piece.z_eq = Z0 - eta_t * c.mu_nv * s / (m * w * w);
    }
    pieces.push_back(piece);
    TranslationalSolution partial(pieces, m);
    const auto end = partial.eval(t1);
    z = end.z;
    p = end.p_z;
  }
  // continuity across boundaries is by construction
  return TranslationalSolution(std::move(pieces), m);
}

TranslationalOde evolve_branch_ode(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const FieldProtocol& protocol,
                                   const SpinBranch& branch,
                                   const std::function<double(double)>& theta_of_t,
                                   double rel_tol, double abs_tol,
                                   double sample_dt) {
  protocol.validate();
  const double m = particle.mass;
  const double Z0 = protocol.Z0();

  TranslationalOde out;
  std::array<double, 2> y{0.0, 0.0};  // z, p_z
  const double edges[5] = {0.0, protocol.tau1, protocol.tau2, protocol.tau3,
                           protocol.tau4};
  for (int k = 0; k < 4; ++k) {
    const double t0 = edges[k], t1 = edges[k + 1];
    const double eta_t = gradient_sign(protocol, t0);
    const int s = branch.s_at(t0, protocol.tau3);
    const double w = eta_t == 0.0 ? 0.0 : trap_frequency(c, eta_t);
    auto rhs = [&](double t, const std::array<double, 2>& st) {
      const double coupling = theta_of_t ? std::cos(theta_of_t(t)) : 1.0;
      const double force =
          -m * w * w * (st[0] - Z0) - eta_t * c.mu_nv * s * coupling;
      return std::array<double, 2>{st[1] / m, force};
    };
    OdeOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    opt.sample_dt = sample_dt;
    opt.max_step = (t1 - t0) / 16.0;
    auto series = integrate_dopri5<2>(rhs, y, t0, t1, opt);
    for (std::size_t i = (k == 0 ? 0 : 1); i < series.t.size(); ++i) {
      out.t.push_back(series.t[i]);
      out.z.push_back(series.y[i][0]);
      out.p_z.push_back(series.y[i][1]);
    }
    y = series.y.back();
  }
  out.final_state = {y[0], y[1], protocol.tau4};
  return out;
}

namespace {

std::array<double, 2> closure_residual(const PhysicalConstants& c,
                                       const ParticleParams& particle,
                                       FieldProtocol proto,
                                       const std::pair<SpinBranch, SpinBranch>& arms,
                                       double tau3, double tau4) {
  proto.tau3 = tau3;
  proto.tau4 = tau4;
  proto.validate();
  const auto solL = evolve_branch_closed(c, particle, proto, arms.first);
  const auto solR = evolve_branch_closed(c, particle, proto, arms.second);
  const auto L = solL.eval(tau4);
  const auto R = solR.eval(tau4);
  return {L.z - R.z, L.p_z - R.p_z};
}

}  // namespace

ClosureResult close_interferometer(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const FieldProtocol& protocol_template,
                                   const std::pair<SpinBranch, SpinBranch>& arms,
                                   double tol_z, double tol_p) {
  protocol_template.validate();
  if (tol_p < 0.0) tol_p = particle.mass * 1e-9;  // 1 nm/s of momentum

  double tau3 = protocol_template.tau3;
  double tau4 = protocol_template.tau4;
  auto res = closure_residual(c, particle, protocol_template, arms, tau3, tau4);

  ClosureResult result;
  const int max_iter = 60;
  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter;
    result.residual_z = res[0];
    result.residual_p = res[1];
    if (std::abs(res[0]) <= tol_z && std::abs(res[1]) <= tol_p) {
      result.converged = true;
      break;
    }

    // finite-difference Jacobian in (tau3, tau4)
    const double h = 1e-7;
    auto r3 = closure_residual(c, particle, protocol_template, arms, tau3 + h, tau4);
    auto r4 = closure_residual(c, particle, protocol_template, arms, tau3, tau4 + h);
    const double J[2][2] = {{(r3[0] - res[0]) / h, (r4[0] - res[0]) / h},
                            {(r3[1] - res[1]) / h, (r4[1] - res[1]) / h}};
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (std::abs(det) < 1e-300)
      throw ClosureError("closure: singular Jacobian", res[0], res[1]);
    double d3 = -(J[1][1] * res[0] - J[0][1] * res[1]) / det;
    double d4 = -(-J[1][0] * res[0] + J[0][0] * res[1]) / det;

    // damped update keeping the stage ordering intact
    double lambda = 1.0;
    const double norm0 = std::hypot(res[0] / tol_z, res[1] / tol_p);
    for (int bt = 0; bt < 8; ++bt) {
      double t3 = tau3 + lambda * d3;
      double t4 = tau4 + lambda * d4;
      if (t3 <= protocol_template.tau2 || t4 <= t3) {
        lambda *= 0.5;
        continue;
      }
      auto trial = closure_residual(c, particle, protocol_template, arms, t3, t4);
      if (std::hypot(trial[0] / tol_z, trial[1] / tol_p) < norm0 || lambda < 0.1) {
        tau3 = t3;
        tau4 = t4;
        res = trial;
        break;
      }
      lambda *= 0.5;
    }
  }
  if (!result.converged)
    throw ClosureError("closure: no convergence", result.residual_z,
                       result.residual_p);
  result.protocol = protocol_template;
  result.protocol.tau3 = tau3;
  result.protocol.tau4 = tau4;
  return result;
}

}  // namespace sgi
