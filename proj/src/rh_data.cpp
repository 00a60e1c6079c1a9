#include "nnls/rh_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "nnls/errors.hpp"
#include "nnls/specfun.hpp"

namespace nnls {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
constexpr double kNoFocus = std::numeric_limits<double>::quiet_NaN();

std::vector<cplx> centered_derivative(const std::vector<cplx>& y, double h) {
  const std::size_t n = y.size();
  std::vector<cplx> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
  }
  d[1] = (y[2] - y[0]) / (2.0 * h);
  d[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * h);
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
  return d;
}

// Integral of f over [lo, hi] cell by cell along the k grid. Sub-intervals
// within `radius` of `focus` are integrated on geometric panels clustered at
// the point nearest to `focus`, which resolves log singularities there.
template <class F>
cplx grid_integral(const ReflectionData& r, double lo, double hi, F&& f, double focus,
                   double radius) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo};
  const double h = r.spacing();
  const double x0 = r.k_min();
  const auto first = static_cast<long>(std::floor((lo - x0) / h)) + 1;
  for (long j = std::max(first, 0L); j < static_cast<long>(r.k.size()); ++j) {
    const double node = r.k[static_cast<std::size_t>(j)];
    if (node >= hi) break;
    if (node > lo) cuts.push_back(node);
  }
  const bool has_focus = !std::isnan(focus);
  if (has_focus && focus > lo && focus < hi) {
    cuts.push_back(focus);
    std::sort(cuts.begin(), cuts.end());
  }
  cuts.push_back(hi);

  const std::function<cplx(double)> fn = f;
  cplx sum = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double u = cuts[s];
    const double v = cuts[s + 1];
    if (!(v > u)) continue;
    if (has_focus) {
      const double nearest = std::clamp(focus, u, v);
      if (std::abs(nearest - focus) <= radius) {
        if (nearest >= v) {
          sum -= integrate_graded(fn, v, u);
        } else if (nearest <= u) {
          sum += integrate_graded(fn, u, v);
        } else {
          sum -= integrate_graded(fn, nearest, u);
          sum += integrate_graded(fn, nearest, v);
        }
        continue;
      }
    }
    sum += integrate_gl(fn, u, v, 1);
  }
  return sum;
}

bool inside(const ReflectionData& r, double k) { return k >= r.k_min() && k <= r.k_max(); }

cplx g_at(const ReflectionData& r, double k) { return inside(r, k) ? r.dlog_w(k) : cplx(0.0); }

}  // namespace

ReflectionData reflect(const SpectralData& s) {
  require_symmetric(s.k);
  const std::size_t n = s.k.size();
  if (n < 5) throw Error(ErrorKind::Input, "reflect: need at least 5 k nodes");
  ReflectionData r;
  r.k = s.k;
  r.sigma = s.sigma;
  r.r1.resize(n);
  r.r2.resize(n);
  r.w.resize(n);
  r.arg_w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(s.a1[i]) > 1e-10) || !(std::abs(s.a2[i]) > 1e-10)) {
      throw Error(ErrorKind::ZeroOnGrid, "reflect: a1 or a2 vanishes at k = " + std::to_string(s.k[i]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = mirror_index(s.k, i);
    r.r1[i] = s.b[i] / s.a1[i];
    r.r2[i] = std::conj(s.b[j]) / s.a2[i];
    r.w[i] = 1.0 + static_cast<double>(s.sigma) * r.r1[i] * r.r2[i];
  }
  r.arg_w[0] = std::arg(r.w[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double step = std::arg(r.w[i] / r.w[i - 1]);
    if (std::abs(step) >= 0.5 * kPi) {
      throw Error(ErrorKind::PhaseStep, "reflect: arg w jumps by >= pi/2 between nodes; refine the k grid");
    }
    r.arg_w[i] = r.arg_w[i - 1] + step;
  }
  std::vector<cplx> logw(n);
  for (std::size_t i = 0; i < n; ++i) logw[i] = cplx(std::log(std::abs(r.w[i])), r.arg_w[i]);
  const double h = s.k[1] - s.k[0];
  r.log_w = UniformSpline(s.k.front(), h, logw);
  r.dlog_w = UniformSpline(s.k.front(), h, centered_derivative(logw, h));
  r.r1_spline = UniformSpline(s.k.front(), h, r.r1);
  r.r2_spline = UniformSpline(s.k.front(), h, r.r2);
  return r;
}

ReflectionData reflect_profile(const InitialProfile& q0, double k_max, std::size_t nodes,
                               const ScatterOptions& opt, std::size_t max_nodes,
                               SpectralData* spectral) {
  std::size_t n = nodes;
  for (;;) {
    SpectralData s = scatter(q0, symmetric_grid(k_max, n), opt);
    try {
      ReflectionData r = reflect(s);
      if (spectral) *spectral = std::move(s);
      return r;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PhaseStep || 2 * n - 1 > max_nodes) throw;
      n = 2 * n - 1;
    }
  }
}

cplx log_w_at(const ReflectionData& r, double k) {
  return inside(r, k) ? r.log_w(k) : cplx(0.0);
}

cplx nu_at(const ReflectionData& r, double xi) {
  const double k0 = -xi;
  for (std::size_t i = 0; i < r.k.size() && r.k[i] <= k0; ++i) {
    if (std::abs(r.arg_w[i]) >= kPi) {
      throw Error(ErrorKind::Assumption, "nu: |arg w| reaches pi on (-inf, -xi]");
    }
  }
  const cplx lw = log_w_at(r, k0);
  if (std::abs(lw.imag()) >= kPi) throw Error(ErrorKind::Assumption, "nu: |arg w(-xi)| >= pi");
  return -lw / (2.0 * kPi);
}

cplx chi_at(const ReflectionData& r, double xi) {
  const double k0 = -xi;
  const double lo = r.k_min();
  if (k0 <= lo) return 0.0;
  const double h = r.spacing();
  if (k0 > r.k_max()) {
    auto f = [&](double z) -> cplx { return std::log(k0 - z) * g_at(r, z); };
    const cplx I = grid_integral(r, lo, r.k_max(), f, k0, 2.0 * h);
    return -I / (2.0 * kPi * kI);
  }
  const cplx g0 = g_at(r, k0);
  auto f = [&](double z) -> cplx {
    const double d = k0 - z;
    if (d <= 0.0) return 0.0;
    return std::log(d) * (g_at(r, z) - g0);
  };
  const double S = k0 - lo;
  const cplx I = grid_integral(r, lo, k0, f, k0, 2.0 * h) + g0 * (S * std::log(S) - S);
  return -I / (2.0 * kPi * kI);
}

cplx chi_complex(const ReflectionData& r, double xi, cplx k) {
  const double k0 = -xi;
  const double lo = r.k_min();
  const double hi = std::min(k0, r.k_max());
  if (!(hi > lo)) return 0.0;
  if (k.imag() == 0.0 && k.real() <= k0) {
    throw Error(ErrorKind::Domain, "chi: k on the cut (-inf, -xi]");
  }
  auto f = [&](double z) -> cplx { return std::log(k - z) * g_at(r, z); };
  const double radius = 2.0 * r.spacing() + std::abs(k.imag());
  const double focus = std::abs(k.imag()) < 4.0 * r.spacing() ? k.real() : kNoFocus;
  const cplx I = grid_integral(r, lo, hi, f, focus, radius);
  return -I / (2.0 * kPi * kI);
}

cplx delta_at(const ReflectionData& r, double xi, cplx k) {
  const double k0 = -xi;
  const double lo = r.k_min();
  const double hi = std::min(k0, r.k_max());
  if (k.imag() == 0.0 && k.real() <= k0) {
    throw Error(ErrorKind::Domain, "delta: k on the cut (-inf, -xi]");
  }
  if (!(hi > lo)) return 1.0;
  const double p = std::clamp(k.real(), lo, hi);
  const cplx fp = r.log_w(p);
  auto f = [&](double z) -> cplx { return (r.log_w(z) - fp) / (z - k); };
  const double focus = std::abs(k.imag()) < 4.0 * r.spacing() ? p : kNoFocus;
  const cplx I = grid_integral(r, lo, hi, f, focus, 2.0 * r.spacing()) +
                 fp * std::log((hi - k) / (lo - k));
  return std::exp(I / (2.0 * kPi * kI));
}

cplx delta_boundary(const ReflectionData& r, double xi, double zeta, int side) {
  const double k0 = -xi;
  const double lo = r.k_min();
  const double hi = std::min(k0, r.k_max());
  if (!(zeta > lo && zeta < hi)) {
    throw Error(ErrorKind::Domain, "delta_boundary: point not inside the cut");
  }
  const cplx fz = r.log_w(zeta);
  auto f = [&](double s) -> cplx {
    const double d = s - zeta;
    return d == 0.0 ? r.dlog_w(zeta) : (r.log_w(s) - fz) / d;
  };
  const cplx pv = grid_integral(r, lo, hi, f, kNoFocus, 0.0) + fz * std::log((hi - zeta) / (zeta - lo));
  const cplx I = pv + static_cast<double>(side) * kI * kPi * fz;
  return std::exp(I / (2.0 * kPi * kI));
}

cplx delta_factored(const ReflectionData& r, double xi, cplx k) {
  const cplx nu = log_w_at(r, -xi) / (-2.0 * kPi);
  return std::exp(kI * nu * std::log(xi + k) + chi_complex(r, xi, k));
}

cplx pv_log_w(const ReflectionData& r, double x) {
  const double lo = r.k_min();
  const double hi = r.k_max();
  if (!(x > lo && x < hi)) throw Error(ErrorKind::Domain, "pv: point outside the grid interior");
  const cplx fx = r.log_w(x);
  auto f = [&](double s) -> cplx {
    const double d = s - x;
    return d == 0.0 ? r.dlog_w(x) : (r.log_w(s) - fx) / d;
  };
  return grid_integral(r, lo, hi, f, kNoFocus, 0.0) + fx * std::log((hi - x) / (x - lo));
}

const char* to_string(RemainderClass c) {
  switch (c) {
    case RemainderClass::Pos: return "pos";
    case RemainderClass::Zero: return "zero";
    case RemainderClass::Neg: return "neg";
  }
  return "zero";
}

RemainderClass classify(cplx nu, double dead_band) {
  if (nu.imag() > dead_band) return RemainderClass::Pos;
  if (nu.imag() < -dead_band) return RemainderClass::Neg;
  return RemainderClass::Zero;
}

RayData ray_at(const ReflectionData& r, double xi) {
  RayData ray;
  ray.xi = xi;
  ray.nu = nu_at(r, xi);
  ray.chi = chi_at(r, xi);
  const double k0 = -xi;
  if (inside(r, k0)) {
    ray.r1 = r.r1_spline(k0);
    ray.r2 = r.r2_spline(k0);
  }
  ray.remainder_class = classify(ray.nu);
  return ray;
}

GateReport gate_assumptions(const InitialProfile& q0, const ReflectionData& r,
                            const ScatterOptions& opt) {
  GateReport g;
  const double K = default_contour_size(q0);
  std::function<cplx(cplx)> a1;
  std::function<cplx(cplx)> a2_reflected;
  if (q0.kind() == ProfileKind::Box) {
    a1 = [&](cplx k) { return box_spectral(q0.H(), q0.L(), q0.sigma(), k).a1; };
    a2_reflected = [&](cplx k) {
      return std::conj(box_spectral(q0.H(), q0.L(), q0.sigma(), std::conj(k)).a2);
    };
  } else {
    a1 = [&](cplx k) { return scatter_a1(q0, k, opt); };
    a2_reflected = [&](cplx k) { return std::conj(scatter_a2(q0, std::conj(k), opt)); };
  }
  try {
    g.zeros_a1 = count_zeros_upper(a1, K);
    g.zeros_a2 = count_zeros_upper(a2_reflected, K);
    g.gate_i = g.zeros_a1 == 0 && g.zeros_a2 == 0;
  } catch (const Error& e) {
    g.note = std::string("zero count failed: ") + e.what();
    g.gate_i = false;
  }
  for (double a : r.arg_w) g.max_abs_arg = std::max(g.max_abs_arg, std::abs(a));
  g.gate_ii = g.max_abs_arg < kPi;
  g.l1_norm = q0.l1_norm();
  g.l1_gate = g.l1_norm < 0.817;
  const double x = 2.0 * g.l1_norm;
  g.i0_value = x <= 50.0 ? specfun::bessel_i0(x) : std::numeric_limits<double>::infinity();
  g.i0_gate = g.i0_value < 2.0;
  g.grid_spacing = r.spacing();
  return g;
}

void write_ray_csv(std::ostream& out, const std::vector<RayData>& rays, const GateReport& gates) {
  out << "xi,re_nu,im_nu,re_chi,im_chi,re_p,im_p,remainder_class,gate_i,gate_ii\n";
  char buf[512];
  for (const RayData& ray : rays) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%d,%d\n", ray.xi,
                  ray.nu.real(), ray.nu.imag(), ray.chi.real(), ray.chi.imag(), ray.p.real(),
                  ray.p.imag(), to_string(ray.remainder_class), gates.gate_i ? 1 : 0,
                  gates.gate_ii ? 1 : 0);
    out << buf;
  }
}

}  // namespace nnls
