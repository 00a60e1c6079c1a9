#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nnls/numerics.hpp"
#include "nnls/ode.hpp"

namespace nnls {

enum class ProfileKind { Box, Sampled };

/// Initial datum q0(x). A box is H on (0, L) and zero elsewhere; a sampled
/// profile lives on a uniform grid symmetric about 0.
class InitialProfile {
 public:
  static InitialProfile zero(int sigma);
  static InitialProfile box(cplx H, double L, int sigma);
  /// values[j] at x_j = -x_max + j * 2 x_max / (n - 1); n must be odd.
  static InitialProfile sampled(double x_max, std::vector<cplx> values, int sigma,
                                double decay_tol = 1e-10);

  ProfileKind kind() const { return kind_; }
  int sigma() const { return sigma_; }
  cplx H() const { return H_; }
  double L() const { return L_; }
  double x_max() const;
  const std::vector<cplx>& values() const { return values_; }
  std::vector<double> xgrid() const;

  cplx operator()(double x) const;
  /// Support of q0 as [lo, hi] together with interior breakpoints.
  std::vector<double> breakpoints() const;
  double l1_norm() const;
  bool is_zero() const;

 private:
  ProfileKind kind_ = ProfileKind::Sampled;
  int sigma_ = 1;
  cplx H_ = 0.0;
  double L_ = 0.0;
  std::vector<cplx> values_;
  UniformSpline spline_;
};

struct SpectralPoint {
  cplx a1 = 1.0;
  cplx a2 = 1.0;
  cplx b = 0.0;
};

struct SpectralData {
  std::vector<double> k;
  std::vector<cplx> a1, a2, b;
  int sigma = 1;
};

struct ScatterOptions {
  OdeOptions ode{};
  int threads = 0;  // 0: library default
};

/// Scattering functions at a single k. Real k uses a co-moving frame so the
/// fast phase e^{2ikx} is never integrated; complex k integrates the Jost
/// systems directly (a1 needs Im k >= 0, a2 needs Im k <= 0 for stability).
SpectralPoint scatter_at(const InitialProfile& q0, cplx k, const ScatterOptions& opt = {});
cplx scatter_a1(const InitialProfile& q0, cplx k, const ScatterOptions& opt = {});
cplx scatter_a2(const InitialProfile& q0, cplx k, const ScatterOptions& opt = {});

SpectralData scatter(const InitialProfile& q0, const std::vector<double>& kgrid,
                     const ScatterOptions& opt = {});

/// Closed-form spectral functions of the box; entire in k.
SpectralPoint box_spectral(cplx H, double L, int sigma, cplx k);

struct PropertyReport {
  double symmetry = 0.0;     // max |conj(a_j(-k)) - a_j(k)|
  double determinant = 0.0;  // max |a1 a2 + sigma b(k) conj(b(-k)) - 1|
  double tail = 0.0;         // max of |a1 - 1|, |a2 - 1|, |b| at the grid ends
  bool tail_monotone = true; // |a_j - 1| non-increasing over the outer nodes at both ends
  /// Largest identity violation (symmetry, determinant); the tail is O(1/k) and reported apart.
  double max() const;
};

/// Throws Error(Domain) when the grid is not symmetric about 0.
PropertyReport check_properties(const SpectralData& s);

/// Index j with k[j] = -k[i] on a symmetric grid.
std::size_t mirror_index(const std::vector<double>& k, std::size_t i);
void require_symmetric(const std::vector<double>& k);

struct Rectangle {
  double left = -10.0;
  double right = 10.0;
  double bottom = 0.0;
  double top = 10.0;
};

struct ZeroCountOptions {
  double contour_tol = 1e-8;  // minimum admissible |f| on the contour
  double max_arg_step = 0.7;  // radians between accepted contour nodes
  int initial_nodes_per_side = 64;
  double min_spacing = 1e-9;
};

/// Winding number of f around 0 along the rectangle (counterclockwise).
/// Throws Error(ZeroOnGrid) if |f| on the contour drops below contour_tol.
int count_zeros(const std::function<cplx(cplx)>& f, const Rectangle& box,
                const ZeroCountOptions& opt = {});

/// Zeros of a1 in the upper half-plane, counted on [-K, K] x [0, K].
int count_zeros_upper(const std::function<cplx(cplx)>& a1, double K,
                      const ZeroCountOptions& opt = {});

/// Default contour half-size for a profile.
double default_contour_size(const InitialProfile& q0);

void write_spectral_csv(std::ostream& out, const SpectralData& s);
SpectralData read_spectral_csv(std::istream& in, int sigma);

/// Uniform k grid, n nodes on [-k_max, k_max], exactly mirror-symmetric.
/// An even n leaves k = 0 out.
std::vector<double> symmetric_grid(double k_max, std::size_t n);

}  // namespace nnls
