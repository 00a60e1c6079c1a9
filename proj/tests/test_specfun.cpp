#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nnls/errors.hpp"
#include "nnls/specfun.hpp"

using nnls::cplx;
using namespace nnls::specfun;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Power series for I0 in long double.
long double i0_series(long double x) {
  long double term = 1.0L;
  long double sum = 1.0L;
  const long double y = x * x / 4.0L;
  for (int m = 1; m < 400; ++m) {
    term *= y / (static_cast<long double>(m) * m);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("gamma at one half") {
  CHECK(rel(gamma(cplx(0.5)), std::sqrt(kPi)) < 1e-14);
}

TEST_CASE("gamma product identities") {
  // Reference values computed with 30-digit arithmetic.
  CHECK(rel(gamma({0.5, -0.5}) * gamma({0.5, 0.5}), 1.25204033125214762) < 1e-12);
  CHECK(rel(gamma({0.0, -1.0}) * gamma({0.0, 1.0}), 0.27202905498213316) < 1e-12);
  for (double a : {0.5, 1.0, 2.0, 3.7}) {
    const cplx p1 = gamma({0.5, -a / 2}) * gamma({0.5, a / 2});
    CHECK(rel(p1, kPi / std::cosh(kPi * a / 2)) < 1e-10);
    const cplx p2 = gamma({0.0, -a / 2}) * gamma({0.0, a / 2});
    CHECK(rel(p2, 2 * kPi / (a * std::sinh(kPi * a / 2))) < 1e-10);
  }
}

TEST_CASE("gamma recurrence and reflection") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-9.5, 9.5);
  std::uniform_real_distribution<double> v(-10.0, 10.0);
  double worst_rec = 0;
  double worst_ref = 0;
  for (int i = 0; i < 1000; ++i) {
    const cplx z(u(rng), v(rng));
    worst_rec = std::max(worst_rec, rel(gamma(z + 1.0), z * gamma(z)));
    const cplx s = std::sin(kPi * z);
    worst_ref = std::max(worst_ref, rel(gamma(z) * gamma(1.0 - z), kPi / s));
  }
  CHECK(worst_rec < 1e-10);
  CHECK(worst_ref < 1e-10);
}

TEST_CASE("gamma integers and poles") {
  CHECK(rel(gamma(cplx(5.0)), 24.0) < 1e-13);
  CHECK(rel(gamma(cplx(-0.5)), -2 * std::sqrt(kPi)) < 1e-13);
  CHECK_THROWS_AS(gamma(cplx(0.0)), nnls::Error);
  try {
    gamma(cplx(-3.0));
    FAIL("expected pole");
  } catch (const nnls::Error& e) {
    CHECK(e.kind() == nnls::ErrorKind::Pole);
  }
  try {
    gamma(cplx(200.0));
    FAIL("expected overflow");
  } catch (const nnls::Error& e) {
    CHECK(e.kind() == nnls::ErrorKind::Overflow);
  }
  CHECK(rgamma(cplx(-2.0)) == cplx(0.0));
  CHECK(std::abs(rgamma(cplx(0.0, 1e-13))) < 1e-12);
}

TEST_CASE("lgamma matches log of gamma on the right half-plane") {
  for (cplx z : {cplx(0.7, 0.3), cplx(3.5, -2.0), cplx(8.0, 6.0)}) {
    CHECK(std::abs(std::exp(lgamma(z)) - gamma(z)) / std::abs(gamma(z)) < 1e-12);
  }
}

TEST_CASE("pcf of order zero is a Gaussian") {
  CHECK(std::abs(pcf_d(0.0, 1.0) - std::exp(-0.25)) < 1e-12);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0.0, 5.0);
  std::uniform_real_distribution<double> th(-kPi, kPi);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const cplx z = std::polar(r(rng), th(rng));
    const cplx exact = std::exp(-z * z / 4.0);
    worst = std::max(worst, std::abs(pcf_d(0.0, z) - exact) / std::max(1.0, std::abs(exact)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("pcf value at the origin") {
  const cplx a(0.0, 1.0);
  const cplx expected = std::pow(cplx(2.0), a / 2.0) * std::sqrt(kPi) / gamma((1.0 - a) / 2.0);
  CHECK(rel(pcf_d(a, 0.0), expected) < 1e-13);
}

TEST_CASE("pcf against the two-term large-z expansion") {
  const cplx a(0.0, 1.0);
  const cplx z = std::polar(5.0, kPi / 4);
  const cplx z2 = z * z;
  const cplx lead = std::pow(z, a) * std::exp(-z2 / 4.0);
  const cplx approx = lead * (1.0 - a * (a - 1.0) / (2.0 * z2));
  // The first omitted term a(a-1)(a-2)(a-3)/(8 z^4) is 2.0e-3 here.
  const double omitted = std::abs(a * (a - 1.0) * (a - 2.0) * (a - 3.0) / (8.0 * z2 * z2));
  CHECK(omitted == doctest::Approx(2.0e-3).epsilon(0.01));
  CHECK(rel(pcf_d(a, z), approx) < 1.5 * omitted);
  const cplx three = lead * (1.0 - a * (a - 1.0) / (2.0 * z2) +
                             a * (a - 1.0) * (a - 2.0) * (a - 3.0) / (8.0 * z2 * z2));
  CHECK(rel(pcf_d(a, z), three) < 0.5 * omitted);
}

TEST_CASE("pcf reference values") {
  // 30-digit reference values.
  struct Case {
    cplx a, z, ref;
  };
  const Case cases[] = {
      {{0, 1}, std::polar(5.0, kPi / 4), {-0.024474746637604795, 0.46544241981951368}},
      {{0.3, -0.2}, {3, 1}, {-0.014851087152876388, -0.20482757869865452}},
      {{0, 2}, {-4, 2}, {-4.6562195106248239, -49.818148286758933}},
      {{-1.5, 0.5}, {10, -3}, {-2.7549420418382780e-12, -3.4795125735686511e-12}},
      {{0.05, 0.02}, std::polar(7.0, -0.75 * kPi), {1.1117266870616344, 0.28408244760747054}},
      {{0, -0.1}, std::polar(20.0, 0.7 * kPi), {27826392410466.099, 17381809598856.330}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.a);
    CAPTURE(c.z);
    CHECK(rel(pcf_d(c.a, c.z), c.ref) < 1e-10);
  }
}

TEST_CASE("pcf derivative relation and ODE residual") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ar(-2.0, 2.0);
  std::uniform_real_distribution<double> zr(0.0, 14.0);
  std::uniform_real_distribution<double> th(-kPi, kPi);
  double worst_rel = 0;
  double worst_ode = 0;
  for (int i = 0; i < 100; ++i) {
    const cplx a(ar(rng), ar(rng));
    const cplx z = std::polar(zr(rng), th(rng));
    const PcfValue v = pcf_d_with_derivative(a, z);
    const cplx rhs = 0.5 * z * v.value - pcf_d(a + 1.0, z);
    const double scale = std::abs(v.derivative) + std::abs(0.5 * z * v.value);
    worst_rel = std::max(worst_rel, std::abs(v.derivative - rhs) / scale);

    const double h = 1e-2;
    cplx stencil[5];
    for (int j = -2; j <= 2; ++j) stencil[j + 2] = pcf_d(a, z + static_cast<double>(j) * h);
    const cplx d2 = (-stencil[0] + 16.0 * stencil[1] - 30.0 * stencil[2] + 16.0 * stencil[3] -
                     stencil[4]) /
                    (12.0 * h * h);
    const cplx q = 0.25 * z * z - a - 0.5;
    const double ode_scale = std::abs(d2) + std::abs(q * v.value);
    worst_ode = std::max(worst_ode, std::abs(d2 - q * v.value) / ode_scale);
  }
  CHECK(worst_rel < 1e-8);
  CHECK(worst_ode < 1e-6);
}

TEST_CASE("pcf evaluation paths agree where they overlap") {
  // Outside the recessive sector the origin path is checked against the
  // expansion on |z| = 12. Inside it the inward path from the anchor is
  // checked against the origin path at a radius where the latter is stable.
  double worst = 0;
  for (double ar : {-2.0, 0.0, 1.5}) {
    for (double ai : {-1.0, 0.3, 2.0}) {
      const cplx a(ar, ai);
      for (int j = 0; j < 24; ++j) {
        const double phase = -kPi + (j + 0.5) * kPi / 12;
        if (std::abs(phase) < kPi / 4) {
          const cplx z = std::polar(4.0, phase);
          worst = std::max(worst, rel(detail::pcf_from_anchor(a, z).value,
                                      detail::pcf_from_origin(a, z).value));
        } else {
          const cplx z = std::polar(kPcfAsymptoticRadius, phase);
          worst = std::max(worst, rel(detail::pcf_from_origin(a, z).value,
                                      detail::pcf_asymptotic(a, z).value));
        }
      }
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("pcf envelope") {
  CHECK_THROWS_AS(pcf_d(6.0, 1.0), nnls::Error);
  try {
    pcf_d(0.0, 31.0);
    FAIL("expected envelope error");
  } catch (const nnls::Error& e) {
    CHECK(e.kind() == nnls::ErrorKind::Envelope);
  }
}

TEST_CASE("bessel i0") {
  CHECK(bessel_i0(0.0) == 1.0);
  CHECK(std::abs(bessel_i0(2.0) - 2.2795853023360673) < 1e-14);
  CHECK(bessel_i0(1.634) < 2.0);
  CHECK(std::abs(bessel_i0(1.634) - 1.7874893434792752) < 1e-13);
  for (double x : {0.1, 0.5, 3.0, 10.0, 25.0, 50.0}) {
    const double ref = static_cast<double>(i0_series(x));
    CHECK(std::abs(bessel_i0(x) - ref) / ref < 1e-13);
  }
  try {
    bessel_i0(-1.0);
    FAIL("expected domain error");
  } catch (const nnls::Error& e) {
    CHECK(e.kind() == nnls::ErrorKind::Domain);
  }
}
