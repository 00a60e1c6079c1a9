#include "nnls/model_rhp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include <json.hpp>
#include <tbb/parallel_for.h>

#include "nnls/errors.hpp"
#include "nnls/specfun.hpp"

namespace nnls {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

cplx unit(double angle) { return std::polar(1.0, angle); }

// A(z) = [[i z/2, beta], [gamma, -i z/2]]
Matrix2C ode_matrix(const ModelCoefficients& c, cplx z) {
  return {0.5 * kI * z, c.beta, c.gamma_c, -0.5 * kI * z};
}

// side = +1 uses the upper half-plane formulas, -1 the lower ones.
Matrix2C m0_side(const ModelCoefficients& c, cplx z, int side) {
  const cplx a = kI * c.nu;
  const double t1 = side > 0 ? -0.75 * kPi : 0.25 * kPi;
  const double t2 = side > 0 ? -0.25 * kPi : 0.75 * kPi;
  const cplx w1 = unit(t1);
  const cplx w2 = unit(t2);
  // The prefactors undo arg w in (w z)^{+-i nu}.
  const cplx c1 = std::exp(c.nu * t1);
  const cplx c2 = std::exp(-c.nu * t2);
  Matrix2C m;
  m.a11 = c1 * specfun::pcf_d(a, w1 * z);
  m.a22 = c2 * specfun::pcf_d(-a, w2 * z);
  if (c.trivial()) {
    m.a12 = 0.0;
    m.a21 = 0.0;
    return m;
  }
  if (c.beta == cplx(0.0) || c.gamma_c == cplx(0.0)) {
    throw Error(ErrorKind::Domain, "m0: beta or gamma vanishes");
  }
  // (d/dz + i z/2) D_a(w z) = a w D_{a-1}(w z) when w^2 = i; likewise with w^2 = -i
  // for the second column.
  m.a21 = -c1 * a * w1 * specfun::pcf_d(a - 1.0, w1 * z) / c.beta;
  m.a12 = c2 * a * w2 * specfun::pcf_d(-a - 1.0, w2 * z) / c.gamma_c;
  return m;
}

// Neville extrapolation of values f_j sampled at s_j to s = 0.
cplx extrapolate_zero(std::vector<double> s, std::vector<cplx> f) {
  const std::size_t n = s.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      f[i] = (s[i + m] * f[i] - s[i] * f[i + 1]) / (s[i + m] - s[i]);
    }
  }
  return f[0];
}

std::vector<cplx> default_samples() {
  std::vector<cplx> z;
  for (int side : {1, -1}) {
    for (double rho : {0.4, 1.3, 2.5, 4.0, 5.5}) {
      for (int j = 0; j < 10; ++j) {
        const double phi = 0.15 + (kPi - 0.3) * j / 9.0;
        z.push_back(std::polar(rho, side * phi));
      }
    }
  }
  return z;
}

}  // namespace

Matrix2C Matrix2C::inverse() const {
  const cplx d = det();
  return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

double Matrix2C::max_abs() const {
  return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
}

Matrix2C operator*(const Matrix2C& a, const Matrix2C& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

Matrix2C operator+(const Matrix2C& a, const Matrix2C& b) {
  return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
}

Matrix2C operator-(const Matrix2C& a, const Matrix2C& b) {
  return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
}

Matrix2C operator*(cplx s, const Matrix2C& a) { return {s * a.a11, s * a.a12, s * a.a21, s * a.a22}; }

ModelCoefficients beta_gamma(cplx r1, cplx r2, cplx nu, int sigma, double xi) {
  ModelCoefficients c;
  c.xi = xi;
  c.nu = nu;
  c.r1 = r1;
  c.r2 = r2;
  c.sigma = sigma;
  if (r1 == cplx(0.0) || r2 == cplx(0.0)) {
    if (nu == cplx(0.0) && r1 == cplx(0.0) && r2 == cplx(0.0)) return c;
    throw Error(ErrorKind::Domain, "beta_gamma: vanishing reflection coefficient");
  }
  const cplx common = std::sqrt(2.0 * kPi) * std::exp(-0.5 * kPi * nu);
  c.beta = common * unit(-0.75 * kPi) * specfun::rgamma(-kI * nu) / r1;
  c.gamma_c = static_cast<double>(sigma) * common * unit(-0.25 * kPi) * specfun::rgamma(kI * nu) / r2;
  return c;
}

ModelCoefficients beta_gamma(cplx r1, cplx r2, int sigma, double xi) {
  const cplx nu = -std::log(1.0 + static_cast<double>(sigma) * r1 * r2) / (2.0 * kPi);
  return beta_gamma(r1, r2, nu, sigma, xi);
}

ModelCoefficients beta_gamma(const RayData& ray, int sigma) {
  return beta_gamma(ray.r1, ray.r2, ray.nu, sigma, ray.xi);
}

std::vector<ModelCoefficients> random_coefficients(std::size_t count, unsigned seed, double nu_max) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> mod(0.05, 0.8);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::vector<ModelCoefficients> out;
  while (out.size() < count) {
    const cplx r1 = std::polar(mod(gen), ang(gen));
    const cplx r2 = std::polar(mod(gen), ang(gen));
    const int sigma = gen() % 2 ? 1 : -1;
    const cplx w = 1.0 + static_cast<double>(sigma) * r1 * r2;
    if (std::abs(std::arg(w)) > 0.5 * kPi) continue;
    const cplx nu = -std::log(w) / (2 * kPi);
    if (std::abs(nu) > nu_max) continue;
    out.push_back(beta_gamma(r1, r2, nu, sigma));
  }
  return out;
}

Matrix2C jump_matrix(const ModelCoefficients& c) {
  const double s = static_cast<double>(c.sigma);
  return {1.0 + s * c.r1 * c.r2, s * c.r2, c.r1, 1.0};
}

Matrix2C m0_eval(const ModelCoefficients& c, cplx z) {
  if (z.imag() == 0.0) throw Error(ErrorKind::Domain, "m0: z on the real axis");
  return m0_side(c, z, z.imag() > 0.0 ? 1 : -1);
}

Matrix2C m0_boundary(const ModelCoefficients& c, double x, int side) {
  return m0_side(c, cplx(x, 0.0), side > 0 ? 1 : -1);
}

Matrix2C m0_normalized(const ModelCoefficients& c, cplx z) {
  const Matrix2C m = m0_eval(c, z);
  const cplx e = std::exp(-kI * c.nu * std::log(z) + 0.25 * kI * z * z);
  return {m.a11 * e, m.a12 / e, m.a21 * e, m.a22 / e};
}

Matrix2C m1_coefficient(const ModelCoefficients& c, double theta) {
  const std::array<double, 4> radii{12.0, 18.0, 24.0, 30.0};
  std::vector<double> s;
  std::array<std::vector<cplx>, 4> f;
  for (double R : radii) {
    const cplx z = std::polar(R, theta);
    const Matrix2C e = z * (m0_normalized(c, z) - Matrix2C::identity());
    s.push_back(1.0 / (R * R));
    f[0].push_back(e.a11);
    f[1].push_back(e.a12);
    f[2].push_back(e.a21);
    f[3].push_back(e.a22);
  }
  return {extrapolate_zero(s, f[0]), extrapolate_zero(s, f[1]), extrapolate_zero(s, f[2]),
          extrapolate_zero(s, f[3])};
}

ModelReport verify_model(const ModelCoefficients& c, const std::vector<cplx>& zset) {
  ModelReport rep;
  const std::vector<cplx> z = zset.empty() ? default_samples() : zset;

  std::vector<double> ode(z.size()), det(z.size());
  tbb::parallel_for(std::size_t{0}, z.size(), [&](std::size_t i) {
    const cplx z0 = z[i];
    const double h = 1e-3 / std::max(1.0, std::abs(z0));
    const Matrix2C mp2 = m0_eval(c, z0 + 2.0 * h);
    const Matrix2C mp1 = m0_eval(c, z0 + h);
    const Matrix2C mm1 = m0_eval(c, z0 - h);
    const Matrix2C mm2 = m0_eval(c, z0 - 2.0 * h);
    const Matrix2C d = (1.0 / (12.0 * h)) * ((mm2 - mp2) + 8.0 * (mp1 - mm1));
    const Matrix2C m = m0_eval(c, z0);
    const Matrix2C am = ode_matrix(c, z0) * m;
    const Matrix2C res = d + am;
    const double col1 = std::hypot(std::abs(res.a11), std::abs(res.a21)) /
                        std::max(std::hypot(std::abs(am.a11), std::abs(am.a21)), 1e-300);
    const double col2 = std::hypot(std::abs(res.a12), std::abs(res.a22)) /
                        std::max(std::hypot(std::abs(am.a12), std::abs(am.a22)), 1e-300);
    ode[i] = std::max(col1, col2);
    det[i] = std::abs(m.det() - 1.0);
  });
  rep.ode_residual = *std::max_element(ode.begin(), ode.end());
  rep.det_drift = *std::max_element(det.begin(), det.end());

  const Matrix2C j0 = jump_matrix(c);
  for (double x : {-3.0, -1.0, 1.0, 3.0}) {
    const Matrix2C j = m0_boundary(c, x, -1).inverse() * m0_boundary(c, x, 1);
    rep.jump_residual = std::max(rep.jump_residual, (j - j0).max_abs());
  }

  rep.product_residual = std::abs(c.beta * c.gamma_c - c.nu);
  rep.top_left_residual = std::abs(std::exp(-2.0 * kPi * c.nu) - j0.a11);

  const std::array<double, 7> radii{6.0, 8.0, 10.0, 13.0, 17.0, 22.0, 28.0};
  double worst_slope = -1.0;
  for (double theta : {0.25 * kPi, 0.75 * kPi}) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double R : radii) {
      const double res = (m0_normalized(c, std::polar(R, theta)) - Matrix2C::identity()).max_abs();
      if (R == radii.back()) rep.normalization_residual = std::max(rep.normalization_residual, res);
      const double lx = std::log(R);
      const double ly = std::log(std::max(res, 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = static_cast<double>(radii.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (std::abs(slope + 1.0) >= std::abs(worst_slope + 1.0)) worst_slope = slope;
  }
  rep.normalization_slope =
      c.trivial() ? std::numeric_limits<double>::quiet_NaN() : worst_slope;

  if (!c.trivial()) {
    for (double theta : {0.25 * kPi, 0.75 * kPi}) {
      const Matrix2C m1 = m1_coefficient(c, theta);
      rep.beta_extraction =
          std::max(rep.beta_extraction, std::abs(-kI * m1.a12 - c.beta) / std::abs(c.beta));
      rep.gamma_extraction =
          std::max(rep.gamma_extraction, std::abs(kI * m1.a21 - c.gamma_c) / std::abs(c.gamma_c));
    }
  }
  return rep;
}

void write_model_report_json(std::ostream& out, const ModelCoefficients& c, const ModelReport& r) {
  auto pair = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  nlohmann::json j;
  j["xi"] = c.xi;
  j["sigma"] = c.sigma;
  j["nu"] = pair(c.nu);
  j["beta"] = pair(c.beta);
  j["gamma"] = pair(c.gamma_c);
  j["r1"] = pair(c.r1);
  j["r2"] = pair(c.r2);
  nlohmann::json res;
  res["ode"] = r.ode_residual;
  res["jump"] = r.jump_residual;
  res["beta_gamma_product"] = r.product_residual;
  res["top_left"] = r.top_left_residual;
  res["det_drift"] = r.det_drift;
  res["normalization"] = r.normalization_residual;
  res["normalization_slope"] = r.normalization_slope;
  res["beta_extraction"] = r.beta_extraction;
  res["gamma_extraction"] = r.gamma_extraction;
  j["residuals"] = res;
  out << j.dump(2) << '\n';
}

}  // namespace nnls
