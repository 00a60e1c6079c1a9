#include "nnls/scattering.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nnls/errors.hpp"

namespace nnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// e^{i phase} with the phase reduced to [-pi, pi] before the trig calls.
cplx unit_phase(double phase) { return std::polar(1.0, std::remainder(phase, kTwoPi)); }

void check_sigma(int sigma) {
  if (sigma != 1 && sigma != -1) throw Error(ErrorKind::Input, "sigma must be +1 or -1");
}

}  // namespace

InitialProfile InitialProfile::zero(int sigma) {
  check_sigma(sigma);
  InitialProfile p;
  p.kind_ = ProfileKind::Box;
  p.sigma_ = sigma;
  p.H_ = 0.0;
  p.L_ = 1.0;
  return p;
}

InitialProfile InitialProfile::box(cplx H, double L, int sigma) {
  check_sigma(sigma);
  if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::Input, "box: L must be positive");
  if (!std::isfinite(H.real()) || !std::isfinite(H.imag())) {
    throw Error(ErrorKind::Input, "box: H must be finite");
  }
  InitialProfile p;
  p.kind_ = ProfileKind::Box;
  p.sigma_ = sigma;
  p.H_ = H;
  p.L_ = L;
  return p;
}

InitialProfile InitialProfile::sampled(double x_max, std::vector<cplx> values, int sigma,
                                       double decay_tol) {
  check_sigma(sigma);
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) {
    throw Error(ErrorKind::Input, "sampled profile: need an odd node count >= 3");
  }
  if (!(x_max > 0) || !std::isfinite(x_max)) {
    throw Error(ErrorKind::Input, "sampled profile: x_max must be positive");
  }
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorKind::Input, "sampled profile: non-finite value");
    }
  }
  if (std::abs(values.front()) > decay_tol || std::abs(values.back()) > decay_tol) {
    throw Error(ErrorKind::NonDecayed, "sampled profile: |q0| at the grid ends exceeds tolerance");
  }
  InitialProfile p;
  p.kind_ = ProfileKind::Sampled;
  p.sigma_ = sigma;
  const double dx = 2.0 * x_max / static_cast<double>(n - 1);
  p.L_ = x_max;
  p.spline_ = UniformSpline(-x_max, dx, values);
  p.values_ = std::move(values);
  return p;
}

double InitialProfile::x_max() const { return L_; }

std::vector<double> InitialProfile::xgrid() const {
  if (kind_ == ProfileKind::Box) return {};
  return linspace(-L_, L_, values_.size());
}

cplx InitialProfile::operator()(double x) const {
  if (kind_ == ProfileKind::Box) return (x > 0.0 && x < L_) ? H_ : cplx(0.0);
  if (x < -L_ || x > L_) return 0.0;
  return spline_(x);
}

std::vector<double> InitialProfile::breakpoints() const {
  if (kind_ == ProfileKind::Box) return {-L_, 0.0, L_};
  return {-L_, L_};
}

double InitialProfile::l1_norm() const {
  if (kind_ == ProfileKind::Box) return std::abs(H_) * L_;
  // Trapezoid on the nodes; the profile is decayed at the ends.
  const double dx = 2.0 * L_ / static_cast<double>(values_.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double w = (i == 0 || i + 1 == values_.size()) ? 0.5 : 1.0;
    sum += w * std::abs(values_[i]);
  }
  return sum * dx;
}

bool InitialProfile::is_zero() const {
  if (kind_ == ProfileKind::Box) return H_ == cplx(0.0);
  return std::all_of(values_.begin(), values_.end(), [](cplx v) { return v == cplx(0.0); });
}

namespace {

using State2 = std::array<cplx, 2>;

// Integrates over consecutive segments between breakpoints.
template <class Rhs>
State2 integrate_segments(const std::vector<double>& bp, State2 y, Rhs&& rhs,
                          const OdeOptions& opt) {
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    if (bp[s + 1] > bp[s]) y = integrate_dp45<2>(rhs, bp[s], bp[s + 1], y, opt);
  }
  return y;
}

// (psi1, e^{-2ikx} psi3) for real k.
State2 first_system_real(const InitialProfile& q0, double k, const OdeOptions& opt) {
  const double sigma = q0.sigma();
  auto rhs = [&](double x, const State2& y) -> State2 {
    const cplx e = unit_phase(2.0 * k * x);
    const cplx q = q0(x);
    const cplx qt = std::conj(q0(-x));
    return {q * e * y[1], -sigma * qt * std::conj(e) * y[0]};
  };
  return integrate_segments(q0.breakpoints(), {1.0, 0.0}, rhs, opt);
}

// (e^{2ikx} psi2, psi4) for real k.
State2 second_system_real(const InitialProfile& q0, double k, const OdeOptions& opt) {
  const double sigma = q0.sigma();
  auto rhs = [&](double x, const State2& y) -> State2 {
    const cplx e = unit_phase(2.0 * k * x);
    const cplx q = q0(x);
    const cplx qt = std::conj(q0(-x));
    return {e * q * y[1], -sigma * qt * std::conj(e) * y[0]};
  };
  return integrate_segments(q0.breakpoints(), {0.0, 1.0}, rhs, opt);
}

State2 first_system_complex(const InitialProfile& q0, cplx k, const OdeOptions& opt) {
  const double sigma = q0.sigma();
  auto rhs = [&](double x, const State2& y) -> State2 {
    return {q0(x) * y[1], 2.0 * kI * k * y[1] - sigma * std::conj(q0(-x)) * y[0]};
  };
  return integrate_segments(q0.breakpoints(), {1.0, 0.0}, rhs, opt);
}

State2 second_system_complex(const InitialProfile& q0, cplx k, const OdeOptions& opt) {
  const double sigma = q0.sigma();
  auto rhs = [&](double x, const State2& y) -> State2 {
    return {-2.0 * kI * k * y[0] + q0(x) * y[1], -sigma * std::conj(q0(-x)) * y[0]};
  };
  return integrate_segments(q0.breakpoints(), {0.0, 1.0}, rhs, opt);
}

}  // namespace

SpectralPoint scatter_at(const InitialProfile& q0, cplx k, const ScatterOptions& opt) {
  if (q0.is_zero()) return {};
  if (k.imag() == 0.0) {
    const State2 y1 = first_system_real(q0, k.real(), opt.ode);
    const State2 y2 = second_system_real(q0, k.real(), opt.ode);
    return {y1[0], y2[1], y1[1]};
  }
  const double x_end = q0.breakpoints().back();
  const State2 y1 = first_system_complex(q0, k, opt.ode);
  const State2 y2 = second_system_complex(q0, k, opt.ode);
  return {y1[0], y2[1], std::exp(-2.0 * kI * k * x_end) * y1[1]};
}

cplx scatter_a1(const InitialProfile& q0, cplx k, const ScatterOptions& opt) {
  if (q0.is_zero()) return 1.0;
  if (k.imag() == 0.0) return first_system_real(q0, k.real(), opt.ode)[0];
  return first_system_complex(q0, k, opt.ode)[0];
}

cplx scatter_a2(const InitialProfile& q0, cplx k, const ScatterOptions& opt) {
  if (q0.is_zero()) return 1.0;
  if (k.imag() == 0.0) return second_system_real(q0, k.real(), opt.ode)[1];
  return second_system_complex(q0, k, opt.ode)[1];
}

SpectralData scatter(const InitialProfile& q0, const std::vector<double>& kgrid,
                     const ScatterOptions& opt) {
  SpectralData out;
  out.sigma = q0.sigma();
  out.k = kgrid;
  const std::size_t n = kgrid.size();
  out.a1.assign(n, 1.0);
  out.a2.assign(n, 1.0);
  out.b.assign(n, 0.0);
  if (q0.is_zero()) return out;

  auto body = [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) {
      const SpectralPoint p = scatter_at(q0, kgrid[i], opt);
      out.a1[i] = p.a1;
      out.a2[i] = p.a2;
      out.b[i] = p.b;
    }
  };
  if (opt.threads > 0) {
    tbb::task_arena arena(opt.threads);
    arena.execute([&] { tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 4), body); });
  } else {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 4), body);
  }
  return out;
}

SpectralPoint box_spectral(cplx H, double L, int sigma, cplx k) {
  // With E = expm1(2ikL): a1 = 1 + sigma |H|^2 (E / 2k)^2, b = -sigma conj(H) E / (2ik).
  // E / (2ik) = L phi(2ikL) where phi(z) = (e^z - 1) / z.
  const cplx z = 2.0 * kI * k * L;
  cplx phi;
  if (std::abs(k * L) < 1e-3) {
    phi = 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  } else {
    // e^z - 1 = (expm1(x) cos y - 2 sin^2(y/2)) + i e^x sin y.
    const double x = z.real();
    const double y = z.imag();
    const double em1 = std::expm1(x);
    const double s = std::sin(0.5 * y);
    const cplx expm1z(em1 * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y));
    phi = expm1z / z;
  }
  const cplx ratio = L * phi;  // E / (2ik)
  const double s = static_cast<double>(sigma);
  SpectralPoint p;
  // (E / 2k)^2 = (i E / 2ik)^2 = -(E / 2ik)^2
  p.a1 = 1.0 - s * std::norm(H) * ratio * ratio;
  p.a2 = 1.0;
  p.b = -s * std::conj(H) * ratio;
  return p;
}

double PropertyReport::max() const { return std::max(symmetry, determinant); }

void require_symmetric(const std::vector<double>& k) {
  const std::size_t n = k.size();
  if (n == 0) throw Error(ErrorKind::Domain, "grid is empty");
  const double scale = std::max(std::abs(k.front()), std::abs(k.back()));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(k[i] + k[n - 1 - i]) > 1e-12 * std::max(1.0, scale)) {
      throw Error(ErrorKind::Domain, "k grid is not symmetric about 0");
    }
  }
}

std::size_t mirror_index(const std::vector<double>& k, std::size_t i) { return k.size() - 1 - i; }

PropertyReport check_properties(const SpectralData& s) {
  require_symmetric(s.k);
  PropertyReport rep;
  const std::size_t n = s.k.size();
  const double sigma = s.sigma;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = mirror_index(s.k, i);
    rep.symmetry = std::max(rep.symmetry, std::abs(std::conj(s.a1[j]) - s.a1[i]));
    rep.symmetry = std::max(rep.symmetry, std::abs(std::conj(s.a2[j]) - s.a2[i]));
    const cplx det = s.a1[i] * s.a2[i] + sigma * s.b[i] * std::conj(s.b[j]) - 1.0;
    rep.determinant = std::max(rep.determinant, std::abs(det));
  }
  for (std::size_t i : {std::size_t{0}, n - 1}) {
    rep.tail = std::max({rep.tail, std::abs(s.a1[i] - 1.0), std::abs(s.a2[i] - 1.0),
                         std::abs(s.b[i])});
  }
  const std::size_t outer = std::min<std::size_t>(8, n / 4);
  for (std::size_t j = 0; j + 1 < outer; ++j) {
    const std::size_t lo = j;
    const std::size_t hi = n - 1 - j;
    for (const auto* a : {&s.a1, &s.a2}) {
      const double slack = 1e-12;
      if (std::abs((*a)[lo] - 1.0) > std::abs((*a)[lo + 1] - 1.0) + slack ||
          std::abs((*a)[hi] - 1.0) > std::abs((*a)[hi - 1] - 1.0) + slack) {
        rep.tail_monotone = false;
      }
    }
  }
  return rep;
}

namespace {

struct Node {
  cplx z;
  cplx f;
};

Node eval_node(const std::function<cplx(cplx)>& f, cplx z, const ZeroCountOptions& opt) {
  const cplx v = f(z);
  if (!(std::abs(v) > opt.contour_tol)) {
    throw Error(ErrorKind::ZeroOnGrid, "count_zeros: function vanishes on the contour");
  }
  return {z, v};
}

double side_winding(const std::function<cplx(cplx)>& f, const Node& a, const Node& b,
                    const ZeroCountOptions& opt, int depth) {
  const double step = std::arg(b.f / a.f);
  if (std::abs(step) <= opt.max_arg_step) return step;
  if (depth > 60 || std::abs(b.z - a.z) < opt.min_spacing) {
    throw Error(ErrorKind::Convergence, "count_zeros: contour refinement did not resolve arg");
  }
  const Node m = eval_node(f, 0.5 * (a.z + b.z), opt);
  return side_winding(f, a, m, opt, depth + 1) + side_winding(f, m, b, opt, depth + 1);
}

}  // namespace

int count_zeros(const std::function<cplx(cplx)>& f, const Rectangle& box,
                const ZeroCountOptions& opt) {
  const std::array<cplx, 5> corners = {cplx(box.left, box.bottom), cplx(box.right, box.bottom),
                                       cplx(box.right, box.top), cplx(box.left, box.top),
                                       cplx(box.left, box.bottom)};
  double total = 0.0;
  for (int side = 0; side < 4; ++side) {
    const cplx z0 = corners[side];
    const cplx z1 = corners[side + 1];
    const int m = opt.initial_nodes_per_side;
    Node prev = eval_node(f, z0, opt);
    for (int j = 1; j <= m; ++j) {
      const cplx z = j == m ? z1 : z0 + (z1 - z0) * (static_cast<double>(j) / m);
      const Node cur = eval_node(f, z, opt);
      total += side_winding(f, prev, cur, opt, 0);
      prev = cur;
    }
  }
  const double turns = total / kTwoPi;
  const double rounded = std::nearbyint(turns);
  if (std::abs(turns - rounded) > 1e-6) {
    throw Error(ErrorKind::Convergence, "count_zeros: winding number is not an integer");
  }
  return static_cast<int>(rounded);
}

int count_zeros_upper(const std::function<cplx(cplx)>& a1, double K,
                      const ZeroCountOptions& opt) {
  return count_zeros(a1, Rectangle{-K, K, 0.0, K}, opt);
}

double default_contour_size(const InitialProfile& q0) {
  if (q0.kind() == ProfileKind::Box) return std::max(10.0, 2.0 * std::abs(q0.H()) + 1.0);
  double qmax = 0.0;
  for (const cplx& v : q0.values()) qmax = std::max(qmax, std::abs(v));
  return std::max(10.0, 2.0 * qmax + 1.0);
}

void write_spectral_csv(std::ostream& out, const SpectralData& s) {
  out << "k,re_a1,im_a1,re_a2,im_a2,re_b,im_b\n";
  char buf[512];
  for (std::size_t i = 0; i < s.k.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.k[i],
                  s.a1[i].real(), s.a1[i].imag(), s.a2[i].real(), s.a2[i].imag(), s.b[i].real(),
                  s.b[i].imag());
    out << buf;
  }
}

SpectralData read_spectral_csv(std::istream& in, int sigma) {
  SpectralData s;
  s.sigma = sigma;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::array<double, 7> v{};
    for (std::size_t c = 0; c < v.size(); ++c) {
      std::string cell;
      if (!std::getline(row, cell, ',')) {
        throw Error(ErrorKind::Input, "spectral csv: short row at line " + std::to_string(lineno));
      }
      try {
        std::size_t used = 0;
        v[c] = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Input, "spectral csv: bad number at line " + std::to_string(lineno));
      }
    }
    s.k.push_back(v[0]);
    s.a1.emplace_back(v[1], v[2]);
    s.a2.emplace_back(v[3], v[4]);
    s.b.emplace_back(v[5], v[6]);
  }
  if (!header) throw Error(ErrorKind::Input, "spectral csv: missing header");
  return s;
}

std::vector<double> symmetric_grid(double k_max, std::size_t n) {
  if (n < 3 || !(k_max > 0)) {
    throw Error(ErrorKind::Input, "k grid: need at least 3 nodes and k_max > 0");
  }
  std::vector<double> k = linspace(-k_max, k_max, n);
  // Exact mirror symmetry.
  for (std::size_t i = 0; i < n / 2; ++i) k[n - 1 - i] = -k[i];
  if (n % 2 == 1) k[n / 2] = 0.0;
  return k;
}

}  // namespace nnls
