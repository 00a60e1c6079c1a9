#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace nnls {

using cplx = std::complex<double>;

/// n nodes from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Natural cubic spline through complex samples on a uniform grid.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(double x0, double dx, std::vector<cplx> values);

  cplx operator()(double x) const;
  cplx derivative(double x) const;

  double x0() const { return x0_; }
  double dx() const { return dx_; }
  double x_last() const { return x0_ + dx_ * static_cast<double>(y_.size() - 1); }
  std::size_t size() const { return y_.size(); }
  bool empty() const { return y_.empty(); }

 private:
  std::size_t locate(double x, double& t) const;

  double x0_ = 0.0;
  double dx_ = 1.0;
  std::vector<cplx> y_;
  std::vector<cplx> m_;  // second derivatives at the nodes
};

/// 8-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre8 {
  static const std::array<double, 8> nodes;
  static const std::array<double, 8> weights;
};

/// Fixed rule: Gauss-Legendre 8 on each of `panels` equal panels of [a, b].
cplx integrate_gl(const std::function<cplx(double)>& f, double a, double b, int panels = 1);

/// Adaptive Gauss-Legendre 8 with bisection. `err` receives the error estimate.
cplx integrate_adaptive(const std::function<cplx(double)>& f, double a, double b, double tol,
                        double* err = nullptr, int max_depth = 40);

/// Cauchy principal value PV int_{lo}^{hi} f(s)/(s - x) ds for x in (lo, hi), with f smooth.
/// Uses subtraction of f(x) and the exact log term; the remainder is integrated on
/// panels split at x.
cplx principal_value(const std::function<cplx(double)>& f, double lo, double hi, double x,
                     double tol = 1e-12);

/// Sum of f over [a, b] where f has an integrable singularity at the endpoint `a`
/// (e.g. log); geometric panels cluster at `a`.
cplx integrate_graded(const std::function<cplx(double)>& f, double a, double b, int levels = 40,
                      double ratio = 0.5);

}  // namespace nnls
