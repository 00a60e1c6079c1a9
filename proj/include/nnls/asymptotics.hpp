#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "nnls/rh_data.hpp"

namespace nnls {

struct AsymptoticPrediction {
  double x = 0.0;
  double t = 1.0;
  double xi = 0.0;  // x / (4 t)
  cplx q_leading = 0.0;
  RemainderClass remainder_class = RemainderClass::Zero;
  double remainder_scale = 0.0;
};

/// p(-xi) = sqrt(pi) exp{-pi nu/2 + i pi/4 + 2 chi - 3 i nu ln 2} / (r1 Gamma(-i nu)).
/// Returns 0 for nu = 0; throws Error(Domain) if r1 = 0 while nu != 0.
cplx p_amplitude(cplx nu, cplx chi, cplx r1);
cplx p_amplitude(const RayData& ray);

/// t^{-1+2|Im nu|}, t^{-1} ln t or t^{-1} according to the class of nu.
double remainder_scale(cplx nu, double t);

/// Leading term t^{-1/2 + Im nu} p exp{4 i t xi^2 - i Re nu ln t} at (x, t).
/// `ray` must have been evaluated at xi = x/(4t); throws Error(Input) otherwise
/// and Error(Domain) for t < 1.
AsymptoticPrediction leading_term(const RayData& ray, double x, double t);

/// Computes the ray data at xi = x/(4t) and fills in p.
AsymptoticPrediction predict(const ReflectionData& r, double x, double t);

/// predict() over a batch of (x, t) points, in parallel.
std::vector<AsymptoticPrediction> predict_batch(const ReflectionData& r,
                                                const std::vector<std::pair<double, double>>& xt);

struct LocalReduction {
  double nu = 0.0;
  double p_mod = 0.0;
  double p_arg = 0.0;
};

/// Even data: nu = -ln(1 + sigma |r|^2)/(2 pi), |p|^2 = (sigma/4 pi) ln(1 + sigma |r|^2),
/// arg p = -3 nu ln 2 + pi/4 + arg Gamma(i nu) - arg r(-xi) - 2i chi(-xi) in [-pi, pi].
/// Throws Error(Assumption) unless r1 = conj(r2) on the grid to 1e-7.
LocalReduction local_nls_reduction(const ReflectionData& r, double xi);

void write_prediction_csv(std::ostream& out, const std::vector<AsymptoticPrediction>& rows);

}  // namespace nnls
