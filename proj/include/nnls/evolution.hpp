#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nnls/scattering.hpp"

namespace nnls {

/// dt <= kStabilityBudget * dx^2 keeps kappa_max^2 dt below one radian per step.
inline constexpr double kStabilityBudget = 0.1;

struct EvolveConfig {
  double dt = 2e-4;
  double T = 1.0;
  double X = 128.0;              // periodic cell [-X, X)
  std::size_t N = 4096;          // nodes, power of two
  double dealias_fraction = 2.0 / 3.0;  // modes with |m| > fraction * N/2 are zeroed
  double filter_cutoff = 0.0;    // kappa_f of exp(-(kappa/kappa_f)^order) on q0; 0 disables
  int filter_order = 8;
  double boundary_tol = 1e-6;    // error threshold for |q| in the edge band
  double edge_fraction = 0.05;   // edge band |x| >= (1 - edge_fraction) X
  double blowup_factor = 50.0;   // error when max|q| exceeds this multiple of max|q0|
  std::vector<double> snapshot_times;  // T is always included

  double dx() const { return 2.0 * X / static_cast<double>(N); }
  /// Throws Error(Input) if the configuration is invalid.
  void validate() const;
};

struct Field {
  std::vector<double> x;  // x_j = -X + j dx
  std::vector<cplx> q;
  double t = 0.0;
};

struct EvolveDiagnostics {
  std::size_t steps = 0;
  double max_boundary = 0.0;   // max over steps of |q| in the edge band
  double max_amplitude = 0.0;  // max over steps of max |q|
  double initial_amplitude = 0.0;
  double initial_support = 0.0;  // max |x| where |q0| > 1e-8 max|q0|
};

struct Trajectory {
  EvolveConfig cfg;
  int sigma = 1;
  std::vector<Field> snapshots;  // increasing t, first at t = 0
  EvolveDiagnostics diag;
};

/// Grid values of q0 projected on the N Fourier modes, with the optional filter.
/// Boxes use their exact Fourier coefficients; other profiles are sampled.
Field initial_field(const InitialProfile& q0, const EvolveConfig& cfg);

/// Strang splitting for i q_t + q_xx + 2 sigma q^2 conj(q(-x)) = 0: exact linear
/// half steps in Fourier space, and an RK4 step for the nonlinear part on the
/// node pairs (x, -x). Throws Error(Boundary) or Error(BlowUp) from the monitors.
Trajectory evolve(const InitialProfile& q0, const EvolveConfig& cfg);

/// Same, from a given field at its time.
Trajectory evolve_field(const Field& start, int sigma, const EvolveConfig& cfg);

/// Series (t, q(4 xi t, t)) over the snapshots by 4-point cubic interpolation.
/// Throws Error(Domain) if 4|xi|T + support reaches the edge band.
std::vector<std::pair<double, cplx>> ray_probe(const Trajectory& traj, double xi);

/// Least-squares slope of log|q| against log t over the points with t >= t_min.
/// Throws Error(Domain) with fewer than two usable points or a vanishing sample.
double fit_decay_slope(const std::vector<std::pair<double, cplx>>& series, double t_min);

/// Band-limited upsampling by `factor`, then cropping to the smallest symmetric
/// window outside which |q| <= crop_tol max|q|, as a sampled profile.
InitialProfile field_profile(const Field& f, int sigma, int factor = 4, double crop_tol = 1e-13);

void write_field_csv(std::ostream& out, const Field& f);
std::string field_sidecar_json(const Field& f, const EvolveConfig& cfg, const EvolveDiagnostics& d);

}  // namespace nnls
