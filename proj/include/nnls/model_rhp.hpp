#pragma once

#include <iosfwd>
#include <vector>

#include "nnls/rh_data.hpp"

namespace nnls {

struct Matrix2C {
  cplx a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  static Matrix2C identity() { return {}; }
  cplx det() const { return a11 * a22 - a12 * a21; }
  Matrix2C inverse() const;
  double max_abs() const;
};

Matrix2C operator*(const Matrix2C& a, const Matrix2C& b);
Matrix2C operator+(const Matrix2C& a, const Matrix2C& b);
Matrix2C operator-(const Matrix2C& a, const Matrix2C& b);
Matrix2C operator*(cplx s, const Matrix2C& a);

/// Coefficients of the parabolic-cylinder model problem at one ray.
struct ModelCoefficients {
  double xi = 0.0;
  cplx beta = 0.0;
  cplx gamma_c = 0.0;
  cplx nu = 0.0;  // nu(-xi); equals beta * gamma_c
  cplx r1 = 0.0;  // r1(-xi)
  cplx r2 = 0.0;  // r2(-xi)
  int sigma = 1;

  bool trivial() const { return nu == cplx(0.0) && beta == cplx(0.0) && gamma_c == cplx(0.0); }
};

/// beta = sqrt(2 pi) e^{-pi nu/2} e^{-3 pi i/4} / (r1 Gamma(-i nu)),
/// gamma = sigma sqrt(2 pi) e^{-pi nu/2} e^{-pi i/4} / (r2 Gamma(i nu)).
/// r1 = r2 = 0 with nu = 0 gives the trivial coefficients; any other vanishing
/// reflection coefficient throws Error(Domain).
ModelCoefficients beta_gamma(cplx r1, cplx r2, cplx nu, int sigma, double xi = 0.0);

/// nu = -ln(1 + sigma r1 r2)/(2 pi) on the principal branch.
ModelCoefficients beta_gamma(cplx r1, cplx r2, int sigma, double xi = 0.0);

ModelCoefficients beta_gamma(const RayData& ray, int sigma);

/// Random (r1, r2, sigma) with |nu| <= nu_max and |arg w| <= pi/2, moduli in [0.05, 0.8].
std::vector<ModelCoefficients> random_coefficients(std::size_t count, unsigned seed, double nu_max = 0.2);

/// j0 = [[1 + sigma r1 r2, sigma r2], [r1, 1]].
Matrix2C jump_matrix(const ModelCoefficients& c);

/// m0(z) for Im z != 0 (throws Error(Domain) on the real axis).
Matrix2C m0_eval(const ModelCoefficients& c, cplx z);

/// Boundary value of m0 on the real axis from above (side = +1) or below (side = -1).
/// Each half-plane formula is entire in z, so this is its value at real z.
Matrix2C m0_boundary(const ModelCoefficients& c, double x, int side);

/// m0(z) z^{-i nu sigma3} e^{i z^2/4 sigma3}, which tends to I; z^{i nu} uses the principal log.
Matrix2C m0_normalized(const ModelCoefficients& c, cplx z);

/// z (m0_normalized(z) - I) extrapolated to z = infinity along the ray arg z = theta.
Matrix2C m1_coefficient(const ModelCoefficients& c, double theta);

struct ModelReport {
  double ode_residual = 0.0;         // relative, max over z samples
  double jump_residual = 0.0;        // max |m0-^{-1} m0+ - j0|
  double product_residual = 0.0;     // |beta gamma - nu|
  double top_left_residual = 0.0;    // |e^{-2 pi nu} - (1 + sigma r1 r2)|
  double det_drift = 0.0;            // max |det m0 - 1|
  double normalization_residual = 0.0;  // |m0_normalized - I| at the largest radius
  double normalization_slope = 0.0;  // fitted d log residual / d log |z|
  double beta_extraction = 0.0;      // |-i (m1)12 - beta| / |beta|
  double gamma_extraction = 0.0;     // |i (m1)21 - gamma| / |gamma|
};

/// Runs every check. `zset` lists off-axis points for the ODE residual and the
/// determinant; empty selects 50 points per half-plane. Jumps are checked at
/// z = +-1, +-3 and normalization on the rays arg z = pi/4, 3 pi/4.
ModelReport verify_model(const ModelCoefficients& c, const std::vector<cplx>& zset = {});

void write_model_report_json(std::ostream& out, const ModelCoefficients& c, const ModelReport& r);

}  // namespace nnls
