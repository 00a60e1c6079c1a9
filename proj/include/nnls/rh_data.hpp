#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nnls/numerics.hpp"
#include "nnls/scattering.hpp"

namespace nnls {

/// Reflection coefficients on a symmetric k grid with w = 1 + sigma r1 r2 and
/// its argument unwrapped from the left end of the grid.
struct ReflectionData {
  std::vector<double> k;
  std::vector<cplx> r1, r2, w;
  std::vector<double> arg_w;
  int sigma = 1;

  UniformSpline log_w;   // ln|w| + i arg_w
  UniformSpline dlog_w;  // d/dk of the above, from 4th-order differences
  UniformSpline r1_spline, r2_spline;

  double k_min() const { return k.front(); }
  double k_max() const { return k.back(); }
  double spacing() const { return k[1] - k[0]; }
};

/// Throws Error(ZeroOnGrid) if |a1| or |a2| <= 1e-10 at a node and
/// Error(PhaseStep) if consecutive nodes differ in arg w by pi/2 or more.
ReflectionData reflect(const SpectralData& s);

/// scatter + reflect, doubling the node count on PhaseStep (up to max_nodes).
ReflectionData reflect_profile(const InitialProfile& q0, double k_max, std::size_t nodes,
                               const ScatterOptions& opt = {}, std::size_t max_nodes = 64001,
                               SpectralData* spectral = nullptr);

/// ln w at k on the unwrapped branch (0 outside the grid).
cplx log_w_at(const ReflectionData& r, double k);

/// nu(-xi) = -(ln|w(-xi)| + i arg_w(-xi)) / (2 pi).
/// Throws Error(Assumption) if |arg_w| >= pi somewhere on (-inf, -xi].
cplx nu_at(const ReflectionData& r, double xi);

/// chi(-xi) = -(1/(2 pi i)) int_{-inf}^{-xi} ln(-xi - z) d ln w(z).
cplx chi_at(const ReflectionData& r, double xi);

/// chi(k) = -(1/(2 pi i)) int_{-inf}^{-xi} ln(k - z) d ln w(z) for k off (-inf, -xi).
cplx chi_complex(const ReflectionData& r, double xi, cplx k);

/// delta(k, xi) = exp{(1/(2 pi i)) int_{-inf}^{-xi} ln w(z) / (z - k) dz}.
/// Throws Error(Domain) for k on the cut.
cplx delta_at(const ReflectionData& r, double xi, cplx k);

/// Boundary value of delta on the cut from above (side = +1) or below (side = -1).
cplx delta_boundary(const ReflectionData& r, double xi, double zeta, int side);

/// (xi + k)^{i nu} e^{chi(k)}, the factored form of delta.
cplx delta_factored(const ReflectionData& r, double xi, cplx k);

/// PV int ln w(z) / (z - x) dz over the grid interval.
cplx pv_log_w(const ReflectionData& r, double x);

enum class RemainderClass { Pos, Zero, Neg };
const char* to_string(RemainderClass c);
RemainderClass classify(cplx nu, double dead_band = 1e-12);

struct RayData {
  double xi = 0.0;
  cplx nu = 0.0;
  cplx chi = 0.0;
  cplx p = 0.0;
  cplx r1 = 0.0;  // r1(-xi)
  cplx r2 = 0.0;  // r2(-xi)
  RemainderClass remainder_class = RemainderClass::Zero;
};

/// nu, chi, r1, r2 at the stationary point -xi; p is left for asymptotics.
RayData ray_at(const ReflectionData& r, double xi);

struct GateReport {
  int zeros_a1 = -1;  // upper half-plane; -1 if counting failed
  int zeros_a2 = -1;  // lower half-plane
  bool gate_i = false;
  double max_abs_arg = 0.0;  // max |arg_w| over the grid
  bool gate_ii = false;
  double l1_norm = 0.0;
  bool l1_gate = false;      // ||q0||_1 < 0.817
  double i0_value = 0.0;     // I0(2 ||q0||_1)
  bool i0_gate = false;      // I0(2 ||q0||_1) < 2
  double grid_spacing = 0.0;
  std::string note;
  bool passed() const { return gate_i && gate_ii; }
};

GateReport gate_assumptions(const InitialProfile& q0, const ReflectionData& r,
                            const ScatterOptions& opt = {});

void write_ray_csv(std::ostream& out, const std::vector<RayData>& rays, const GateReport& gates);

}  // namespace nnls
