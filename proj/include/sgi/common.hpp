#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgi {

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ProtocolError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClosureError : NumericalError {
  ClosureError(const std::string& msg, double rz, double rp)
      : NumericalError(msg), residual_z(rz), residual_p(rp) {}
  double residual_z;  // m
  double residual_p;  // kg m/s
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> v)
      : std::runtime_error(join(v)), violations(std::move(v)) {}
  std::vector<std::string> violations;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "config error:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
};

namespace units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double tesla_per_gauss = 1e-4;
// 1 G/um = 1e-4 T / 1e-6 m
inline constexpr double tesla_per_m_per_gauss_per_um = 1e2;
inline constexpr double m_per_nm = 1e-9;
inline constexpr double m_per_um = 1e-6;

constexpr double gauss_to_tesla(double g) { return g * tesla_per_gauss; }
constexpr double tesla_to_gauss(double t) { return t / tesla_per_gauss; }
constexpr double gauss_per_um_to_tesla_per_m(double g) {
  return g * tesla_per_m_per_gauss_per_um;
}
constexpr double tesla_per_m_to_gauss_per_um(double t) {
  return t / tesla_per_m_per_gauss_per_um;
}
constexpr double nm_to_m(double nm) { return nm * m_per_nm; }
constexpr double m_to_nm(double m) { return m / m_per_nm; }
constexpr double hz_to_rad_s(double hz) { return hz * two_pi; }
constexpr double rad_s_to_hz(double w) { return w / two_pi; }

}  // namespace units

/// Fundamental constants in SI units. Values may be overridden for testing
/// but default to CODATA / diamond-NV values.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;        // J s
  double h = 6.62607015e-34;            // J s
  double mu0 = 1.25663706212e-6;        // T m / A
  double kB = 1.380649e-23;             // J / K
  double chi_rho = -6.2e-9;             // m^3 / kg, diamagnetic
  double mu_nv = 6.62607015e-34 * 2.8e10;   // J/T  (h x 2.8 MHz/G)
  double D_zfs = 6.62607015e-34 * 2.87e9;   // J    (h x 2.87 GHz)

  void validate() const {
    std::vector<std::string> bad;
    auto fin = [&](double x, const char* n) {
      if (!std::isfinite(x)) bad.push_back(std::string(n) + " not finite");
    };
    fin(hbar, "hbar");
    fin(h, "h");
    fin(mu0, "mu0");
    fin(kB, "kB");
    fin(chi_rho, "chi_rho");
    fin(mu_nv, "mu_nv");
    fin(D_zfs, "D_zfs");
    if (!(chi_rho < 0)) bad.push_back("chi_rho must be negative (diamagnetic)");
    if (!(mu_nv > 0)) bad.push_back("mu_nv must be positive");
    if (!(D_zfs > 0)) bad.push_back("D_zfs must be positive");
    if (!bad.empty()) throw ParameterError(ConfigError(bad).what());
  }
};

}  // namespace sgi
