#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "nnls/errors.hpp"

namespace nnls {

struct OdeOptions {
  double atol = 1e-11;
  double rtol = 1e-10;
  double initial_step = 0.0;  // 0 picks a step from the interval length
  long max_steps = 2'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) for y' = f(x, y) with complex state.
/// Integrates from x0 to x1 (either direction) and returns y(x1).
/// Throws Error(StepUnderflow) when the step collapses below round-off.
template <std::size_t N, class Rhs>
std::array<std::complex<double>, N> integrate_dp45(Rhs&& f, double x0, double x1,
                                                   std::array<std::complex<double>, N> y,
                                                   const OdeOptions& opt = {},
                                                   OdeStats* stats = nullptr) {
  using State = std::array<std::complex<double>, N>;
  const double span = x1 - x0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double h = opt.initial_step > 0 ? opt.initial_step : std::min(std::abs(span), 1e-2);
  h *= dir;
  double x = x0;
  State k1 = f(x, y);
  State k2, k3, k4, k5, k6, k7, tmp, ynew;
  long steps = 0;

  while ((x1 - x) * dir > 0) {
    if (++steps > opt.max_steps) {
      throw Error(ErrorKind::StepUnderflow, "ode: step budget exhausted");
    }
    if ((x + h - x1) * dir > 0) h = x1 - x;
    if (std::abs(h) <= 1e-15 * std::max(1.0, std::abs(x))) {
      throw Error(ErrorKind::StepUnderflow, "ode: step size underflow");
    }

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(x + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(x + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(x + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(x + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(x + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(x + h, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::complex<double> e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / scale);
    }

    if (err <= 1.0) {
      x = (std::abs(x1 - (x + h)) <= 1e-15 * std::max(1.0, std::abs(x1))) ? x1 : x + h;
      y = ynew;
      k1 = k7;
      if (stats) ++stats->accepted;
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h *= grow;
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
    }
  }
  return y;
}

}  // namespace nnls
