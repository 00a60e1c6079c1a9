#include "nnls/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "nnls/errors.hpp"

namespace nnls {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

UniformSpline::UniformSpline(double x0, double dx, std::vector<cplx> values)
    : x0_(x0), dx_(dx), y_(std::move(values)) {
  const std::size_t n = y_.size();
  if (n < 2 || !(dx > 0)) throw Error(ErrorKind::Input, "spline: need >= 2 nodes and dx > 0");
  m_.assign(n, cplx(0.0));
  if (n < 3) return;
  // Tridiagonal system for natural end conditions: m[i-1] + 4 m[i] + m[i+1] = 6 d2y / dx^2.
  const std::size_t inner = n - 2;
  std::vector<double> c(inner);
  std::vector<cplx> d(inner);
  const double scale = 6.0 / (dx * dx);
  for (std::size_t j = 0; j < inner; ++j) {
    const std::size_t i = j + 1;
    d[j] = scale * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]);
  }
  c[0] = 1.0 / 4.0;
  d[0] /= 4.0;
  for (std::size_t j = 1; j < inner; ++j) {
    const double denom = 4.0 - c[j - 1];
    c[j] = 1.0 / denom;
    d[j] = (d[j] - d[j - 1]) / denom;
  }
  m_[inner] = d[inner - 1];
  for (std::size_t j = inner - 1; j-- > 0;) {
    d[j] -= c[j] * d[j + 1];
  }
  for (std::size_t j = 0; j < inner; ++j) m_[j + 1] = d[j];
}

std::size_t UniformSpline::locate(double x, double& t) const {
  const double s = (x - x0_) / dx_;
  const double last = static_cast<double>(y_.size() - 1);
  double cell = std::floor(s);
  cell = std::clamp(cell, 0.0, last - 1.0);
  t = s - cell;
  return static_cast<std::size_t>(cell);
}

cplx UniformSpline::operator()(double x) const {
  double t = 0.0;
  const std::size_t i = locate(x, t);
  const double u = 1.0 - t;
  const double h2 = dx_ * dx_ / 6.0;
  return u * y_[i] + t * y_[i + 1] +
         h2 * ((u * u * u - u) * m_[i] + (t * t * t - t) * m_[i + 1]);
}

cplx UniformSpline::derivative(double x) const {
  double t = 0.0;
  const std::size_t i = locate(x, t);
  const double u = 1.0 - t;
  return (y_[i + 1] - y_[i]) / dx_ +
         dx_ / 6.0 * (-(3.0 * u * u - 1.0) * m_[i] + (3.0 * t * t - 1.0) * m_[i + 1]);
}

const std::array<double, 8> GaussLegendre8::nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
const std::array<double, 8> GaussLegendre8::weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

namespace {

cplx gl8(const std::function<cplx(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    sum += GaussLegendre8::weights[i] * f(mid + half * GaussLegendre8::nodes[i]);
  }
  return half * sum;
}

cplx adaptive(const std::function<cplx(double)>& f, double a, double b, cplx whole, double tol,
              int depth, double& err) {
  const double mid = 0.5 * (a + b);
  const cplx left = gl8(f, a, mid);
  const cplx right = gl8(f, mid, b);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth <= 0) {
    err += diff;
    return left + right;
  }
  return adaptive(f, a, mid, left, 0.5 * tol, depth - 1, err) +
         adaptive(f, mid, b, right, 0.5 * tol, depth - 1, err);
}

}  // namespace

cplx integrate_gl(const std::function<cplx(double)>& f, double a, double b, int panels) {
  cplx sum = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) sum += gl8(f, a + p * w, a + (p + 1) * w);
  return sum;
}

cplx integrate_adaptive(const std::function<cplx(double)>& f, double a, double b, double tol,
                        double* err, int max_depth) {
  double e = 0.0;
  const cplx out = adaptive(f, a, b, gl8(f, a, b), tol, max_depth, e);
  if (err) *err = e;
  return out;
}

cplx principal_value(const std::function<cplx(double)>& f, double lo, double hi, double x,
                     double tol) {
  if (!(x > lo && x < hi)) throw Error(ErrorKind::Domain, "principal_value: x outside (lo, hi)");
  const cplx fx = f(x);
  auto rest = [&](double s) -> cplx {
    const double d = s - x;
    if (d == 0.0) return 0.0;
    return (f(s) - fx) / d;
  };
  const cplx part = integrate_adaptive(rest, lo, x, tol) + integrate_adaptive(rest, x, hi, tol);
  return part + fx * std::log((hi - x) / (x - lo));
}

cplx integrate_graded(const std::function<cplx(double)>& f, double a, double b, int levels,
                      double ratio) {
  cplx sum = 0.0;
  const double len = b - a;
  double outer = 1.0;
  for (int j = 0; j < levels; ++j) {
    const double inner = outer * ratio;
    sum += gl8(f, a + len * inner, a + len * outer);
    outer = inner;
  }
  return sum;
}

}  // namespace nnls
