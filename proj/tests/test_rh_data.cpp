#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nnls/errors.hpp"
#include "nnls/rh_data.hpp"

using namespace nnls;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

InitialProfile sampled(const std::function<cplx(double)>& f, double x_max = 12.0,
                       std::size_t n = 1201) {
  const auto x = linspace(-x_max, x_max, n);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(x[i]);
  return InitialProfile::sampled(x_max, v, 1);
}

InitialProfile gaussian() {
  return sampled([](double x) { return cplx(0.3 * std::exp(-x * x)); });
}

InitialProfile two_bump() {
  return sampled([](double x) {
    return 0.25 * std::exp(-(x - 1.5) * (x - 1.5)) * std::exp(cplx(0.0, 0.5)) +
           cplx(0.15, -0.05) * std::exp(-2.0 * (x + 1.0) * (x + 1.0));
  });
}

// Unwrapped log of a1 a2, independent of reflect().
std::vector<cplx> log_a1a2(const SpectralData& s) {
  std::vector<cplx> out(s.k.size());
  double arg = std::arg(s.a1[0] * s.a2[0]);
  for (std::size_t i = 0; i < s.k.size(); ++i) {
    const cplx a = s.a1[i] * s.a2[i];
    if (i > 0) arg += std::arg(a / (s.a1[i - 1] * s.a2[i - 1]));
    out[i] = cplx(std::log(std::abs(a)), arg);
  }
  return out;
}

// PV int F(z)/(z - k_m) dz over the grid by subtraction and composite Simpson,
// for a node k_m; the removable point uses a 4th-order centered difference.
cplx pv_simpson(const std::vector<double>& k, const std::vector<cplx>& F, std::size_t m) {
  const std::size_t n = k.size();
  const double h = k[1] - k[0];
  std::vector<cplx> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = i == m ? (-F[m + 2] + 8.0 * F[m + 1] - 8.0 * F[m - 1] + F[m - 2]) / (12.0 * h)
                  : (F[i] - F[m]) / (k[i] - k[m]);
  }
  cplx sum = g[0] + g[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g[i];
  const double K = k.back();
  return sum * h / 3.0 + F[m] * std::log((K - k[m]) / (K + k[m]));
}

struct Pipeline {
  InitialProfile q0;
  SpectralData s;
  ReflectionData r;
};

Pipeline run(const InitialProfile& q0, std::size_t n = 1201) {
  Pipeline p{q0, {}, {}};
  p.s = scatter(q0, symmetric_grid(12.0, n));
  p.r = reflect(p.s);
  return p;
}

}  // namespace

TEST_CASE("trivial reflection data") {
  const auto p = run(InitialProfile::zero(1), 41);
  for (std::size_t i = 0; i < p.r.k.size(); ++i) {
    CHECK(p.r.r1[i] == cplx(0.0));
    CHECK(p.r.r2[i] == cplx(0.0));
    CHECK(p.r.w[i] == cplx(1.0));
    CHECK(p.r.arg_w[i] == 0.0);
  }
  CHECK(nu_at(p.r, 0.3) == cplx(0.0));
  CHECK(chi_at(p.r, 0.3) == cplx(0.0));
  CHECK(std::abs(delta_at(p.r, 0.3, {0.2, 1.0}) - 1.0) < 1e-15);
}

TEST_CASE("box: w is the reciprocal of a1") {
  const auto p = run(InitialProfile::box({0.3, 0.4}, 1.0, 1));
  double worst = 0;
  for (std::size_t i = 0; i < p.r.k.size(); ++i) {
    const SpectralPoint e = box_spectral({0.3, 0.4}, 1.0, 1, p.r.k[i]);
    worst = std::max(worst, std::abs(p.r.w[i] - 1.0 / e.a1));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("nu for the box at a point where a1 is real") {
  // H = 1, L = 1: a1(pi/2) = 1 + 4/pi^2 > 0, so nu = ln(1 + 4/pi^2)/(2 pi).
  const SpectralPoint e = box_spectral(1.0, 1.0, 1, kPi / 2);
  CHECK(std::abs(-std::log(1.0 / e.a1) / (2 * kPi) - 0.0541508683) < 1e-9);
  CHECK(std::abs(-std::log(1.0 / e.a1) / (2 * kPi) - std::log(1.0 + 4.0 / (kPi * kPi)) / (2 * kPi)) < 1e-15);
  // That datum has a1(0) = 1 - |H|^2 L^2 = 0: the solitonless hypothesis fails on the axis.
  const auto s = scatter(InitialProfile::box(1.0, 1.0, 1), symmetric_grid(12.0, 1201));
  CHECK(std::abs(s.a1[600]) < 1e-8);
  // Same closed-form relation through the pipeline for H = 1/2.
  const auto p = run(InitialProfile::box(0.5, 1.0, 1), 2001);
  const cplx nu = nu_at(p.r, -kPi / 2);
  CHECK(std::abs(nu - std::log(1.0 + 1.0 / (kPi * kPi)) / (2 * kPi)) < 1e-8);
}

TEST_CASE("identities on three profiles") {
  for (const auto& q0 : {InitialProfile::box({0.3, 0.4}, 1.0, 1), gaussian(), two_bump()}) {
    const auto p = run(q0, 2001);
    const std::size_t n = p.r.k.size();
    double ra = 0;
    double rsym = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = n - 1 - i;
      ra = std::max(ra, std::abs(p.r.w[i] * p.s.a1[i] * p.s.a2[i] - 1.0));
      rsym = std::max(rsym, std::abs(p.r.r1[j] * p.r.r2[j] - std::conj(p.r.r1[i] * p.r.r2[i])));
    }
    CHECK(ra < 1e-8);
    CHECK(rsym < 1e-8);

    // nu(-xi) = conj(nu(xi)).
    double nusym = 0;
    for (int m = 0; m < 20; ++m) {
      const double xi = -3.0 + 6.0 * m / 19.0;
      nusym = std::max(nusym, std::abs(nu_at(p.r, xi) - std::conj(nu_at(p.r, -xi))));
    }
    CHECK(nusym < 1e-8);

    // conj chi(-xi) + chi(xi) = -(B + PV int ln(a1 a2)/(z - xi)) / (2 pi i) on [-K, K],
    // B = ln|K - xi| ln w(K) - ln|K + xi| ln w(-K).
    const auto F = log_a1a2(p.s);
    const double K = p.r.k.back();
    double chisym = 0;
    for (int m = 0; m < 20; ++m) {
      const std::size_t node = 750 + 25 * static_cast<std::size_t>(m);  // xi in [-3, 2.7]
      const double xi = p.r.k[node];
      const cplx lhs = std::conj(chi_at(p.r, xi)) + chi_at(p.r, -xi);
      const cplx B = -(std::log(K - xi) * F.back() - std::log(K + xi) * F.front());
      const cplx rhs = -(B + pv_simpson(p.r.k, F, node)) / (2.0 * kPi * kI);
      chisym = std::max(chisym, std::abs(lhs - rhs));
    }
    CHECK(chisym < 1e-6);
  }
}

TEST_CASE("even data gives r1 = conj(r2)") {
  const auto p = run(gaussian());
  double worst = 0;
  for (std::size_t i = 0; i < p.r.k.size(); ++i) {
    worst = std::max(worst, std::abs(p.r.r1[i] - std::conj(p.r.r2[i])));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("delta jump, normalization and factored form") {
  const auto p = run(two_bump());
  const double xi = -0.4;
  double jump = 0;
  double jump_eps = 0;
  for (int m = 0; m < 10; ++m) {
    const double z0 = -2.9 + 0.31 * m;
    const cplx w0 = std::exp(log_w_at(p.r, z0));
    const cplx ratio = delta_boundary(p.r, xi, z0, +1) / delta_boundary(p.r, xi, z0, -1);
    jump = std::max(jump, std::abs(ratio - w0));
    // Off-cut deviation is O(eps) with a coefficient that grows near the endpoint.
    const cplx r6 = delta_at(p.r, xi, {z0, 1e-6}) / delta_at(p.r, xi, {z0, -1e-6});
    const cplx r8 = delta_at(p.r, xi, {z0, 1e-8}) / delta_at(p.r, xi, {z0, -1e-8});
    jump_eps = std::max(jump_eps, std::abs(r8 - w0));
    CHECK(std::abs(r6 - w0) == doctest::Approx(100.0 * std::abs(r8 - w0)).epsilon(0.05));
  }
  CHECK(jump < 1e-10);
  CHECK(jump_eps < 1e-6);

  double factored = 0;
  for (cplx k : {cplx(0.7, 0.4), cplx(-1.3, 0.2), cplx(-0.2, -0.9), cplx(2.0, -0.05),
                 cplx(-3.0, 1e-3)}) {
    factored = std::max(factored, std::abs(delta_at(p.r, xi, k) - delta_factored(p.r, xi, k)));
  }
  CHECK(factored < 1e-6);

  double prev = 1.0;
  for (double y : {10.0, 100.0, 1000.0}) {
    const double dev = std::abs(delta_at(p.r, xi, {0.0, y}) - 1.0);
    CHECK(dev < prev);
    if (y > 10.0) CHECK(dev * y == doctest::Approx(prev * y / 10.0).epsilon(0.2));
    prev = dev;
  }
  CHECK_THROWS_AS(delta_at(p.r, xi, cplx(-1.0, 0.0)), Error);
}

TEST_CASE("phase tracking") {
  const auto p = run(two_bump());
  CHECK(p.r.arg_w.front() == doctest::Approx(std::arg(p.r.w.front())));
  double step = 0;
  for (std::size_t i = 1; i < p.r.k.size(); ++i) {
    step = std::max(step, std::abs(p.r.arg_w[i] - p.r.arg_w[i - 1]));
  }
  CHECK(step < kPi / 2);

  // A coarse grid cannot follow the phase of a large box.
  const auto s = scatter(InitialProfile::box(0.2, 20.0, 1), symmetric_grid(12.0, 41));
  try {
    reflect(s);
    FAIL("expected phase step error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PhaseStep);
  }
  const auto r = reflect_profile(InitialProfile::box(0.2, 20.0, 1), 12.0, 41);
  CHECK(r.k.size() > 41);
}

TEST_CASE("assumption gates on boxes") {
  auto gates = [](double HL, int sigma) {
    const auto q0 = InitialProfile::box(HL, 1.0, sigma);
    const auto r = reflect(scatter(q0, symmetric_grid(12.0, 2401)));
    return gate_assumptions(q0, r);
  };
  {
    const auto g = gates(0.5, 1);
    CHECK(g.gate_i);
    CHECK(g.gate_ii);
    CHECK(g.max_abs_arg < kPi / 2);
    CHECK(g.l1_gate);
    CHECK(g.i0_gate);
  }
  {
    const auto g = gates(1.5, 1);
    CHECK_FALSE(g.gate_i);
    CHECK(g.zeros_a1 >= 1);
    CHECK_FALSE(g.gate_ii);
  }
  {
    const auto g = gates(kPi / 2 + 0.05, -1);
    CHECK(g.zeros_a1 == 2);  // see the scattering tests for the zero locations
    CHECK_FALSE(g.gate_i);
    CHECK_FALSE(g.gate_ii);
  }
}

TEST_CASE("gates for a sampled profile use the ODE off the axis") {
  const auto q0 = two_bump();
  const auto r = reflect(scatter(q0, symmetric_grid(12.0, 601)));
  const auto g = gate_assumptions(q0, r);
  CHECK(g.zeros_a1 == 0);
  CHECK(g.zeros_a2 == 0);
  CHECK(g.passed());
  CHECK(g.l1_norm < 0.817);
}

TEST_CASE("ray data and classification") {
  CHECK(classify({0.1, 1e-13}) == RemainderClass::Zero);
  CHECK(classify({0.1, 2e-12}) == RemainderClass::Pos);
  CHECK(classify({0.1, -2e-12}) == RemainderClass::Neg);
  const auto p = run(gaussian());
  const RayData ray = ray_at(p.r, 0.25);
  CHECK(std::abs(ray.nu.imag()) < 1e-7);
  CHECK(ray.nu.real() < 0.0);
  std::ostringstream out;
  write_ray_csv(out, {ray}, GateReport{});
  CHECK(out.str().rfind("xi,re_nu,im_nu,re_chi,im_chi", 0) == 0);
}
