#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sgi/common.hpp"

namespace sgi {

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 = choose automatically
  double sample_dt = 0.0;     // 0 = record every accepted step
  std::size_t max_steps = 500'000'000;
};

template <std::size_t N>
struct OdeSeries {
  std::vector<double> t;
  std::vector<std::array<double, N>> y;
  std::size_t n_steps = 0;
  std::size_t n_rejected = 0;

  const std::array<double, N>& back() const { return y.back(); }
};

namespace detail {

template <std::size_t N>
inline std::array<double, N> axpy(const std::array<double, N>& y, double h,
                                  std::initializer_list<double> coeffs,
                                  const std::array<double, N>* const* ks) {
  std::array<double, N> out = y;
  std::size_t j = 0;
  for (double c : coeffs) {
    if (c != 0.0) {
      const auto& k = *ks[j];
      for (std::size_t i = 0; i < N; ++i) out[i] += h * c * k[i];
    }
    ++j;
  }
  return out;
}

// Cubic Hermite interpolation between step endpoints.
template <std::size_t N>
inline std::array<double, N> hermite(double t, double t0, double t1,
                                     const std::array<double, N>& y0,
                                     const std::array<double, N>& y1,
                                     const std::array<double, N>& f0,
                                     const std::array<double, N>& f1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
  return out;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) over [t0, t1].
/// Samples are emitted on a uniform grid (sample_dt) via Hermite
/// interpolation, plus the exact endpoints. The caller splits at field
/// discontinuities; f must be smooth on the interval.
template <std::size_t N, class RHS>
OdeSeries<N> integrate_dopri5(RHS&& f, std::array<double, N> y, double t0,
                              double t1, const OdeOptions& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  // 5th-order weights (b) and embedded 4th-order weights (bs).
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double bs1 = 5179.0 / 57600, bs3 = 7571.0 / 16695,
                          bs4 = 393.0 / 640, bs5 = -92097.0 / 339200,
                          bs6 = 187.0 / 2100, bs7 = 1.0 / 40;

  if (!(t1 > t0)) throw NumericalError("ode: require t1 > t0");

  OdeSeries<N> out;
  double t = t0;
  std::array<double, N> k1 = f(t, y), k2{}, k3{}, k4{}, k5{}, k6{}, k7{};

  double h = opt.initial_step;
  if (h <= 0.0) h = (t1 - t0) / 100.0;
  h = std::min(h, opt.max_step);
  h = std::min(h, t1 - t0);

  out.t.push_back(t);
  out.y.push_back(y);
  double next_sample =
      opt.sample_dt > 0.0 ? t0 + opt.sample_dt : std::numeric_limits<double>::infinity();

  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps)
      throw NumericalError("ode: max step count exceeded");
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    if (h <= std::abs(t) * 1e-16)
      throw NumericalError("ode: step size underflow");

    const std::array<double, N>* ks[6] = {&k1, &k2, &k3, &k4, &k5, &k6};
    k2 = f(t + c2 * h, detail::axpy(y, h, {1.0 / 5}, ks));
    k3 = f(t + c3 * h, detail::axpy(y, h, {3.0 / 40, 9.0 / 40}, ks));
    k4 = f(t + c4 * h,
           detail::axpy(y, h, {44.0 / 45, -56.0 / 15, 32.0 / 9}, ks));
    k5 = f(t + c5 * h,
           detail::axpy(y, h,
                        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                         -212.0 / 729},
                        ks));
    k6 = f(t + h,
           detail::axpy(y, h,
                        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                         49.0 / 176, -5103.0 / 18656},
                        ks));
    auto y_new = detail::axpy(y, h, {b1, 0.0, b3, b4, b5, b6}, ks);
    k7 = f(t + h, y_new);

    // embedded error estimate
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * ((b1 - bs1) * k1[i] + (b3 - bs3) * k3[i] +
                            (b4 - bs4) * k4[i] + (b5 - bs5) * k5[i] +
                            (b6 - bs6) * k6[i] + (0.0 - bs7) * k7[i]);
      const double scale =
          opt.abs_tol +
          opt.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double q = e / scale;
      err += q * q;
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      const double t_new = t + h;
      while (next_sample < t_new) {
        out.t.push_back(next_sample);
        out.y.push_back(detail::hermite(next_sample, t, t_new, y, y_new, k1, k7));
        next_sample += opt.sample_dt;
      }
      if (opt.sample_dt <= 0.0 || last) {
        out.t.push_back(t_new);
        out.y.push_back(y_new);
      }
      t = t_new;
      y = y_new;
      k1 = k7;  // FSAL
      ++out.n_steps;
    } else {
      ++out.n_rejected;
    }

    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    factor = std::min(5.0, std::max(0.2, factor));
    h = std::min(h * factor, opt.max_step);
  }
  return out;
}

/// Convenience wrapper returning only the final state.
template <std::size_t N, class RHS>
std::array<double, N> integrate_to(RHS&& f, std::array<double, N> y0, double t0,
                                   double t1, OdeOptions opt = {}) {
  opt.sample_dt = t1 - t0;  // endpoints only
  auto s = integrate_dopri5<N>(std::forward<RHS>(f), y0, t0, t1, opt);
  return s.y.back();
}

}  // namespace sgi
