#pragma once

#include <complex>

namespace nnls {

using cplx = std::complex<double>;

namespace specfun {

/// Euler Gamma for complex argument.
///
/// Lanczos approximation (g = 7, 9 terms) evaluated in log form, with the
/// reflection formula for Re z < 1/2. Relative accuracy is about 1e-14 for
/// |Re z|, |Im z| <= 10.
///
/// Throws Error(Pole) at non-positive integers and Error(Overflow) when the
/// result exceeds the double range.
cplx gamma(cplx z);

/// 1/Gamma(z), entire; returns exactly 0 at the poles of Gamma.
cplx rgamma(cplx z);

/// log Gamma(z) on the principal sheet for Re z >= 1/2 (continuous in z there).
cplx lgamma(cplx z);

/// Value and z-derivative of the parabolic cylinder function D_a(z).
struct PcfValue {
  cplx value;
  cplx derivative;
};

/// Parabolic cylinder function D_a(z) (Whittaker convention).
///
/// Supported envelope |a| <= 5, |z| <= 30; outside it Error(Envelope) is thrown.
cplx pcf_d(cplx a, cplx z);

/// D_a(z) together with dD_a/dz, same envelope as pcf_d.
PcfValue pcf_d_with_derivative(cplx a, cplx z);

/// Radius beyond which D_a is evaluated from its large-|z| expansion.
inline constexpr double kPcfAsymptoticRadius = 12.0;

/// Radius inside which the Maclaurin expansion at z = 0 is summed directly.
inline constexpr double kPcfMaclaurinRadius = 2.0;

/// Modified Bessel function I_0 on [0, 50], relative accuracy 1e-13.
/// Throws Error(Domain) for negative or too large x.
double bessel_i0(double x);

namespace detail {
// Evaluation paths of D_a, exposed for overlap tests between regions.
PcfValue pcf_asymptotic(cplx a, cplx z);
PcfValue pcf_from_origin(cplx a, cplx z);
PcfValue pcf_from_anchor(cplx a, cplx z);
}  // namespace detail

}  // namespace specfun
}  // namespace nnls
