#include "sgi/rotational.hpp"

#include <cmath>

#include "sgi/ode.hpp"

namespace sgi {

double rotational_hamiltonian(const PhysicalConstants& c,
                              const ParticleParams& particle, const RotVec& y,
                              double B_field, double eta_tilde, int s) {
  const double I = particle.moment_of_inertia();
  const double theta = y[0], psi = y[2];
  const double p_theta = y[3], p_phi = y[4], p_psi = y[5];
  const double st = std::sin(theta), ct = std::cos(theta);
  const double u = p_phi - p_psi * ct;
  const double Bnv = b_nv(B_field, eta_tilde, theta, psi,
                          particle.nv_offset_d, particle.nv_angle_alpha);
  return p_theta * p_theta / (2 * I) + p_psi * p_psi / (2 * I) +
         u * u / (2 * I * st * st) + c.mu_nv * s * Bnv * ct;
}

RotVec hamilton_rhs(const PhysicalConstants& c, const ParticleParams& particle,
                    const RotVec& y, double B_field, double eta_tilde, int s) {
  const double I = particle.moment_of_inertia();
  const double theta = y[0], psi = y[2];
  const double p_theta = y[3], p_phi = y[4], p_psi = y[5];
  const double st = std::sin(theta), ct = std::cos(theta);
  const double d = particle.nv_offset_d;
  const double alpha = particle.nv_angle_alpha;
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double u = p_phi - p_psi * ct;

  RotVec dy;
  dy[0] = p_theta / I;                                   // theta_dot
  dy[1] = u / (I * st * st);                             // phi_dot
  dy[2] = p_psi / I - ct * u / (I * st * st);            // psi_dot

  // -dH/dtheta: kinetic part then the Zeeman part at the NV site
  const double dT_dtheta =
      u * p_psi / (I * st) - u * u * ct / (I * st * st * st);
  const double Bnv = b_nv(B_field, eta_tilde, theta, psi, d, alpha);
  const double dBnv_dtheta =
      eta_tilde * d * (-ca * st + ct * sa * std::cos(psi));
  const double dV_dtheta =
      c.mu_nv * s * (dBnv_dtheta * ct - Bnv * st);
  dy[3] = -(dT_dtheta + dV_dtheta);

  dy[4] = 0.0;  // H has no phi dependence

  // -dH/dpsi, nonzero only through the cos(psi) term of B_nv
  const double dBnv_dpsi = -eta_tilde * d * st * sa * std::sin(psi);
  dy[5] = -c.mu_nv * s * dBnv_dpsi * ct;
  return dy;
}

RotationalState rotation_initial_state(const ParticleParams& particle,
                                       const RotationInit& rotation) {
  const double I = particle.moment_of_inertia();
  RotationalState s;
  s.theta = rotation.theta0;
  s.p_phi = I * rotation.omega0 * std::cos(rotation.theta0);
  s.p_psi = I * rotation.omega0;
  return s;
}

namespace {

double effective_field(const FieldProtocol& protocol,
                       const TranslationalSolution& z_of_t, double t,
                       bool strict) {
  const double z = z_of_t.z(t);
  return strict ? b_signed(protocol, t, z) : b_com(protocol, t, z);
}

// Split [0, tau4] into smooth windows at the stage edges and the spin flip.
std::array<double, 5> protocol_edges(const FieldProtocol& p) {
  return {0.0, p.tau1, p.tau2, p.tau3, p.tau4};
}

}  // namespace

RotTrajectory integrate_full(const PhysicalConstants& c,
                             const ParticleParams& particle,
                             const FieldProtocol& protocol,
                             const SpinBranch& branch,
                             const TranslationalSolution& z_of_t,
                             const RotationInit& rotation,
                             const RotOptions& opt) {
  protocol.validate();
  particle.validate();
  rotation.validate();
  if (!(rotation.omega0 > 0.0))
    throw ParameterError("integrate_full: gyroscopic mode needs omega0 > 0");
  if (rotation.theta0 < opt.singularity_band)
    throw NumericalError(
        "integrate_full: theta0 inside the Euler-angle singularity band; "
        "use the linearized solver");

  const double band = opt.singularity_band;
  const double pi = std::numbers::pi;
  RotTrajectory out;
  RotVec y = to_vec(rotation_initial_state(particle, rotation));

  OdeOptions oopt;
  oopt.rel_tol = opt.rel_tol;
  oopt.abs_tol = opt.abs_tol;
  oopt.max_step = units::two_pi / rotation.omega0 / opt.steps_per_period;
  oopt.sample_dt = opt.sample_dt;

  const auto edges = protocol_edges(protocol);
  for (int k = 0; k < 4; ++k) {
    const double t0 = edges[k], t1 = edges[k + 1];
    const double eta_t = gradient_sign(protocol, t0);
    const int s = branch.s_at(t0, protocol.tau3);
    auto rhs = [&](double t, const RotVec& st) {
      if (st[0] < band || st[0] > pi - band)
        throw NumericalError("integrate_full: entered singularity band");
      const double B = effective_field(protocol, z_of_t, t, opt.field_sign_strict);
      return hamilton_rhs(c, particle, st, B, eta_t, s);
    };
    auto series = integrate_dopri5<6>(rhs, y, t0, t1, oopt);
    out.n_steps += series.n_steps;
    for (std::size_t i = (k == 0 ? 0 : 1); i < series.t.size(); ++i)
      out.samples.push_back(from_vec(series.y[i], series.t[i]));
    y = series.y.back();
  }
  out.final_state = from_vec(y, protocol.tau4);
  return out;
}

LinTrajectory integrate_linearized(const PhysicalConstants& c,
                                   const ParticleParams& particle,
                                   const FieldProtocol& protocol,
                                   const SpinBranch& branch,
                                   const TranslationalSolution& z_of_t,
                                   const RotationInit& rotation,
                                   const RotOptions& opt) {
  protocol.validate();
  particle.validate();
  rotation.validate();
  if (!(rotation.omega0 > 0.0))
    throw ParameterError("integrate_linearized: needs omega0 > 0");

  const double I = particle.moment_of_inertia();
  const double w0 = rotation.omega0;
  const double th0 = rotation.theta0;

  LinTrajectory out;
  // state: theta, theta_dot, phi, psi
  std::array<double, 4> y{th0, 0.0, 0.0, 0.0};

  OdeOptions oopt;
  oopt.rel_tol = opt.rel_tol;
  oopt.abs_tol = opt.abs_tol;
  oopt.max_step = units::two_pi / w0 / opt.steps_per_period;
  oopt.sample_dt = opt.sample_dt;

  double max_exc = 0.0;
  const auto edges = protocol_edges(protocol);
  for (int k = 0; k < 4; ++k) {
    const double t0 = edges[k], t1 = edges[k + 1];
    const int s = branch.s_at(t0, protocol.tau3);
    auto rhs = [&](double t, const std::array<double, 4>& st) {
      const double B = effective_field(protocol, z_of_t, t, opt.field_sign_strict);
      const double muB_I = c.mu_nv * s * B / I;
      const double rate = (w0 / th0) * (st[0] - th0);
      return std::array<double, 4>{
          st[1], -(w0 * w0 - muB_I) * (st[0] - th0) + muB_I * th0, rate, -rate};
    };
    auto series = integrate_dopri5<4>(rhs, y, t0, t1, oopt);
    for (std::size_t i = (k == 0 ? 0 : 1); i < series.t.size(); ++i) {
      out.t.push_back(series.t[i]);
      out.theta.push_back(series.y[i][0]);
      out.theta_dot.push_back(series.y[i][1]);
      out.phi.push_back(series.y[i][2]);
      out.psi.push_back(series.y[i][3]);
      max_exc = std::max(max_exc, std::abs(series.y[i][0] - th0));
    }
    y = series.y.back();
  }
  out.max_excursion_over_theta0 = max_exc / th0;
  out.small_angle_valid = out.max_excursion_over_theta0 < 0.5;
  out.final_state.theta = y[0];
  out.final_state.phi = y[2];
  out.final_state.psi = y[3];
  out.final_state.p_theta = I * y[1];
  out.final_state.p_phi = I * w0 * std::cos(th0);
  out.final_state.p_psi = I * w0;
  out.final_state.t = protocol.tau4;
  return out;
}

double theta_bar(const PhysicalConstants& c, const ParticleParams& particle,
                 double B_c, int s, double omega0, double theta0, bool exact) {
  const double I = particle.moment_of_inertia();
  const double muB = c.mu_nv * s * B_c;
  if (exact) {
    const double denom = I * omega0 * omega0 - muB;
    if (!(denom > 0.0))
      throw NumericalError("theta_bar: rotational instability (I w0^2 <= mu s B)");
    return theta0 + muB * theta0 / denom;
  }
  return theta0 + muB * theta0 / (I * omega0 * omega0);
}

double delta_theta_bound(const PhysicalConstants& c,
                         const ParticleParams& particle, double B0,
                         double theta0, double omega0) {
  const double I = particle.moment_of_inertia();
  return 8.0 * c.mu_nv * B0 * theta0 / (I * omega0 * omega0);
}

PhiPsiSeries accumulate_phi_psi(const std::vector<double>& t,
                                const std::vector<double>& theta,
                                double omega0, double theta0) {
  PhiPsiSeries out;
  out.phi.resize(t.size(), 0.0);
  out.psi.resize(t.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    acc += 0.5 * dt * ((theta[i] - theta0) + (theta[i - 1] - theta0));
    out.phi[i] = (omega0 / theta0) * acc;
    out.psi[i] = -out.phi[i];
  }
  return out;
}

std::vector<double> theta_bar_series(const PhysicalConstants& c,
                                     const ParticleParams& particle,
                                     const FieldProtocol& protocol,
                                     const SpinBranch& branch,
                                     const TranslationalSolution& z_of_t,
                                     const RotationInit& rotation,
                                     const std::vector<double>& grid,
                                     bool exact) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const int s = branch.s_at(t, protocol.tau3);
    const double B = b_com(protocol, t, z_of_t.z(t));
    out.push_back(theta_bar(c, particle, B, s, rotation.omega0,
                            rotation.theta0, exact));
  }
  return out;
}

DeltaPhiArea delta_phi_area(const std::vector<double>& t,
                            const std::vector<double>& theta_bar_L,
                            const std::vector<double>& theta_bar_R,
                            double omega0, double theta0) {
  if (t.size() != theta_bar_L.size() || t.size() != theta_bar_R.size())
    throw ParameterError("delta_phi_area: grid mismatch");
  DeltaPhiArea out;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    const double d0 = theta_bar_L[i - 1] - theta_bar_R[i - 1];
    const double d1 = theta_bar_L[i] - theta_bar_R[i];
    const double mid = 0.5 * (d0 + d1) * dt;
    if (mid >= 0.0)
      out.sigma_A += mid;
    else
      out.sigma_B += -mid;
  }
  out.delta_phi = (omega0 / theta0) * (out.sigma_A - out.sigma_B);
  return out;
}

}  // namespace sgi
