#include "nnls/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "nnls/errors.hpp"

namespace nnls::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogMax = 709.0;

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::nearbyint(z.real());
}

// sin(pi z) with the real part reduced exactly, so integers give exact zeros.
cplx sinpi(cplx z) {
  const double x = z.real() - 2.0 * std::nearbyint(0.5 * z.real());
  const double y = kPi * z.imag();
  double s = 0.0;
  double c = 1.0;
  if (x == 0.0) {
    s = 0.0;
    c = 1.0;
  } else if (std::abs(x) == 1.0) {
    s = 0.0;
    c = -1.0;
  } else if (x == 0.5) {
    s = 1.0;
    c = 0.0;
  } else if (x == -0.5) {
    s = -1.0;
    c = 0.0;
  } else {
    s = std::sin(kPi * x);
    c = std::cos(kPi * x);
  }
  return {s * std::cosh(y), c * std::sinh(y)};
}

// log Gamma for Re z >= 1/2.
cplx lgamma_right(cplx z) {
  const cplx zm = z - 1.0;
  cplx series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    series += kLanczos[i] / (zm + static_cast<double>(i));
  }
  const cplx t = zm + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (zm + 0.5) * std::log(t) - t + std::log(series);
}

cplx checked_exp(cplx log_value) {
  if (log_value.real() > kLogMax) {
    throw Error(ErrorKind::Overflow, "gamma: result overflows double range");
  }
  return std::exp(log_value);
}

// ---------------------------------------------------------------------------
// Parabolic cylinder functions.
//
// D_a solves y'' = (z^2/4 - a - 1/2) y. Three evaluation paths:
//  * large |z|: Poincare expansion, with the exponentially small second
//    solution switched on past the Stokes lines arg z = +-pi/2;
//  * from the origin: D_a(0), D_a'(0) are known in closed form and the
//    solution is continued by Taylor steps of the Weber equation;
//  * from an anchor on |z| = kPcfAsymptoticRadius: used where D_a is
//    recessive (|arg z| < pi/4), integrating inwards so that the dominant
//    companion solution shrinks along the path.

constexpr int kMaxTaylorTerms = 400;

// One Taylor step of the Weber equation from c to c + h. Coefficients are
// carried scaled by h^n so that the partial sums are the values directly.
PcfValue taylor_step(cplx a, cplx c, PcfValue at_c, cplx h) {
  const cplx q0 = 0.25 * c * c - a - 0.5;
  const cplx q1 = 0.5 * c;
  const cplx h2 = h * h;

  std::array<cplx, kMaxTaylorTerms + 2> u{};
  u[0] = at_c.value;
  u[1] = at_c.derivative * h;
  cplx sum = u[0] + u[1];
  cplx dsum = u[1];
  int quiet = 0;
  for (int n = 0; n < kMaxTaylorTerms; ++n) {
    cplx rhs = q0 * u[n];
    if (n >= 1) rhs += q1 * h * u[n - 1];
    if (n >= 2) rhs += 0.25 * h2 * u[n - 2];
    u[n + 2] = h2 * rhs / static_cast<double>((n + 2) * (n + 1));
    sum += u[n + 2];
    dsum += static_cast<double>(n + 2) * u[n + 2];
    const double size = std::abs(sum) + std::abs(dsum);
    if (std::abs(u[n + 2]) * static_cast<double>(n + 3) <= 1e-17 * size) {
      if (++quiet == 3) return {sum, dsum / h};
    } else {
      quiet = 0;
    }
  }
  throw Error(ErrorKind::Convergence, "pcf_d: Taylor continuation did not converge");
}

// Straight-line continuation from `from` to `to`.
PcfValue continue_path(cplx a, cplx from, PcfValue at_from, cplx to) {
  cplx c = from;
  PcfValue y = at_from;
  for (int guard = 0; guard < 10000; ++guard) {
    const cplx remaining = to - c;
    const double dist = std::abs(remaining);
    if (dist == 0.0) return y;
    const double local = std::sqrt(std::abs(0.25 * c * c - a - 0.5)) + 1.0;
    const double hmax = std::min(1.0, 1.5 / local);
    const bool last = dist <= hmax;
    const cplx h = last ? remaining : remaining * (hmax / dist);
    y = taylor_step(a, c, y, h);
    c = last ? to : c + h;
  }
  throw Error(ErrorKind::Convergence, "pcf_d: path continuation exceeded step budget");
}

struct SeriesSum {
  cplx value;
  cplx derivative;  // d/dz of the series
};

// Sums 1 + sum_s c_s z^{-2s} given c_s / c_{s-1}, stopping at the smallest
// term (optimal truncation).
template <class Ratio>
SeriesSum asymptotic_series(cplx z, Ratio ratio) {
  cplx term = 1.0;
  cplx sum = 1.0;
  cplx dsum = 0.0;
  double previous = 1.0;
  for (int s = 1; s < 200; ++s) {
    term *= ratio(s);
    const double size = std::abs(term);
    if (size > previous) {
      if (previous > 1e-14 * std::abs(sum)) {
        throw Error(ErrorKind::Convergence, "pcf_d: asymptotic series too short for |z|");
      }
      break;
    }
    sum += term;
    dsum += -2.0 * static_cast<double>(s) * term / z;
    previous = size;
    if (size <= 1e-17 * std::abs(sum)) break;
  }
  return {sum, dsum};
}

}  // namespace

namespace detail {

PcfValue pcf_asymptotic(cplx a, cplx z) {
  const cplx z2 = z * z;
  const cplx logz = std::log(z);

  const auto first = asymptotic_series(z, [&](int s) {
    const double sd = s;
    return -(a - 2.0 * sd + 2.0) * (a - 2.0 * sd + 1.0) / (2.0 * sd * z2);
  });
  const cplx e1 = std::exp(a * logz - 0.25 * z2);
  PcfValue out{e1 * first.value,
               e1 * ((a / z - 0.5 * z) * first.value + first.derivative)};

  // Past the Stokes lines the recessive solution z^{-a-1} e^{z^2/4} enters
  // with multiplier -sqrt(2 pi)/Gamma(-a) e^{+-i pi a}.
  const double phase = std::arg(z);
  if (std::abs(phase) > 0.5 * kPi) {
    const auto second = asymptotic_series(z, [&](int s) {
      const double sd = s;
      return (a + 2.0 * sd - 1.0) * (a + 2.0 * sd) / (2.0 * sd * z2);
    });
    const cplx rotation = std::exp((phase > 0 ? 1.0 : -1.0) * cplx(0.0, kPi) * a);
    const cplx e2 = -std::sqrt(2.0 * kPi) * rgamma(-a) * rotation *
                    std::exp(-(a + 1.0) * logz + 0.25 * z2);
    out.value += e2 * second.value;
    out.derivative += e2 * ((-(a + 1.0) / z + 0.5 * z) * second.value + second.derivative);
  }
  return out;
}

PcfValue pcf_from_origin(cplx a, cplx z) {
  const double sqrt_pi = std::sqrt(kPi);
  const PcfValue at_zero{
      std::pow(cplx(2.0), 0.5 * a) * sqrt_pi * rgamma(0.5 * (1.0 - a)),
      -std::pow(cplx(2.0), 0.5 * (1.0 + a)) * sqrt_pi * rgamma(-0.5 * a)};
  return continue_path(a, 0.0, at_zero, z);
}

PcfValue pcf_from_anchor(cplx a, cplx z) {
  const double r = std::abs(z);
  const cplx anchor = r > 0.0 ? z * (kPcfAsymptoticRadius / r) : cplx(kPcfAsymptoticRadius);
  return continue_path(a, anchor, pcf_asymptotic(a, anchor), z);
}

}  // namespace detail

namespace {

PcfValue pcf_unchecked(cplx a, cplx z) {
  const double r = std::abs(z);
  if (r >= kPcfAsymptoticRadius) return detail::pcf_asymptotic(a, z);
  if (r <= kPcfMaclaurinRadius) return detail::pcf_from_origin(a, z);
  if (std::abs(std::arg(z)) < 0.25 * kPi) return detail::pcf_from_anchor(a, z);
  return detail::pcf_from_origin(a, z);
}

void check_envelope(cplx a, cplx z) {
  if (!(std::abs(a) <= 5.0 + 1e-12) || !(std::abs(z) <= 30.0 + 1e-12)) {
    throw Error(ErrorKind::Envelope, "pcf_d: (a, z) outside |a| <= 5, |z| <= 30");
  }
}

}  // namespace

cplx lgamma(cplx z) {
  if (z.real() < 0.5) {
    if (is_nonpositive_integer(z)) throw Error(ErrorKind::Pole, "lgamma: pole");
    return std::log(kPi) - std::log(sinpi(z)) - lgamma_right(1.0 - z);
  }
  return lgamma_right(z);
}

cplx gamma(cplx z) {
  if (is_nonpositive_integer(z)) {
    throw Error(ErrorKind::Pole, "gamma: pole at non-positive integer");
  }
  if (z.real() < 0.5) {
    const cplx s = sinpi(z);
    const cplx log_rest = lgamma_right(1.0 - z);
    if (std::log(kPi) - std::log(std::abs(s)) - log_rest.real() > kLogMax) {
      throw Error(ErrorKind::Overflow, "gamma: result overflows double range");
    }
    return kPi / (s * std::exp(log_rest));
  }
  return checked_exp(lgamma_right(z));
}

cplx rgamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z.real() < 0.5) return sinpi(z) * std::exp(lgamma_right(1.0 - z)) / kPi;
  return std::exp(-lgamma_right(z));
}

cplx pcf_d(cplx a, cplx z) {
  check_envelope(a, z);
  return pcf_unchecked(a, z).value;
}

PcfValue pcf_d_with_derivative(cplx a, cplx z) {
  check_envelope(a, z);
  return pcf_unchecked(a, z);
}

double bessel_i0(double x) {
  if (!(x >= 0.0) || x > 50.0) {
    throw Error(ErrorKind::Domain, "bessel_i0: argument outside [0, 50]");
  }
  const double y = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 500; ++m) {
    term *= y / (static_cast<double>(m) * m);
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace nnls::specfun
