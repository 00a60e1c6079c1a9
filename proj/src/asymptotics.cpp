#include "nnls/asymptotics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <tbb/parallel_for.h>

#include "nnls/errors.hpp"
#include "nnls/specfun.hpp"

namespace nnls {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
}  // namespace

cplx p_amplitude(cplx nu, cplx chi, cplx r1) {
  if (nu == cplx(0.0)) return 0.0;
  if (r1 == cplx(0.0)) throw Error(ErrorKind::Domain, "p: r1(-xi) = 0 with nu != 0");
  const cplx e = -0.5 * kPi * nu + kI * (0.25 * kPi) + 2.0 * chi - 3.0 * kI * nu * std::numbers::ln2;
  return std::sqrt(kPi) * std::exp(e) * specfun::rgamma(-kI * nu) / r1;
}

cplx p_amplitude(const RayData& ray) { return p_amplitude(ray.nu, ray.chi, ray.r1); }

double remainder_scale(cplx nu, double t) {
  switch (classify(nu)) {
    case RemainderClass::Pos: return std::pow(t, -1.0 + 2.0 * std::abs(nu.imag()));
    case RemainderClass::Zero: return std::log(t) / t;
    case RemainderClass::Neg: return 1.0 / t;
  }
  return 1.0 / t;
}

AsymptoticPrediction leading_term(const RayData& ray, double x, double t) {
  if (!(t >= 1.0)) throw Error(ErrorKind::Domain, "leading term needs t >= 1");
  const double xi = x / (4.0 * t);
  if (std::abs(xi - ray.xi) > 1e-12 * std::max(1.0, std::abs(xi))) {
    throw Error(ErrorKind::Input, "ray data evaluated at a different xi");
  }
  AsymptoticPrediction out;
  out.x = x;
  out.t = t;
  out.xi = xi;
  const cplx p = p_amplitude(ray);
  const double lt = std::log(t);
  out.q_leading = p * std::exp(cplx((-0.5 + ray.nu.imag()) * lt, 4.0 * t * xi * xi - ray.nu.real() * lt));
  out.remainder_class = classify(ray.nu);
  out.remainder_scale = remainder_scale(ray.nu, t);
  return out;
}

AsymptoticPrediction predict(const ReflectionData& r, double x, double t) {
  if (!(t >= 1.0)) throw Error(ErrorKind::Domain, "leading term needs t >= 1");
  RayData ray = ray_at(r, x / (4.0 * t));
  ray.p = p_amplitude(ray);
  return leading_term(ray, x, t);
}

std::vector<AsymptoticPrediction> predict_batch(const ReflectionData& r,
                                                const std::vector<std::pair<double, double>>& xt) {
  std::vector<AsymptoticPrediction> out(xt.size());
  tbb::parallel_for(std::size_t{0}, xt.size(),
                    [&](std::size_t i) { out[i] = predict(r, xt[i].first, xt[i].second); });
  return out;
}

LocalReduction local_nls_reduction(const ReflectionData& r, double xi) {
  for (std::size_t i = 0; i < r.k.size(); ++i) {
    if (std::abs(r.r1[i] - std::conj(r.r2[i])) > 1e-7) {
      throw Error(ErrorKind::Assumption, "local reduction needs even data (r1 = conj r2)");
    }
  }
  LocalReduction out;
  const RayData ray = ray_at(r, xi);
  const double s = static_cast<double>(r.sigma);
  const double L = std::log1p(s * std::norm(ray.r1));
  out.nu = -L / (2.0 * kPi);
  out.p_mod = std::sqrt(std::max(0.0, s * L / (4.0 * kPi)));
  if (out.p_mod > 0.0) {
    const cplx phase = -2.0 * kI * ray.chi;  // real for even data
    out.p_arg = std::remainder(-3.0 * out.nu * std::numbers::ln2 + 0.25 * kPi +
                                   std::arg(specfun::gamma(cplx(0.0, out.nu))) - std::arg(ray.r1) +
                                   phase.real(),
                               2.0 * kPi);
  }
  return out;
}

void write_prediction_csv(std::ostream& out, const std::vector<AsymptoticPrediction>& rows) {
  out << "x,t,xi,re_q,im_q,abs_q,remainder_class,remainder_scale\n";
  char buf[512];
  for (const auto& p : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g\n", p.x, p.t, p.xi,
                  p.q_leading.real(), p.q_leading.imag(), std::abs(p.q_leading),
                  to_string(p.remainder_class), p.remainder_scale);
    out << buf;
  }
}

}  // namespace nnls
