#include "nnls/evolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "nnls/errors.hpp"

namespace nnls {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft {
 public:
  explicit Fft(std::size_t n) : data(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    const int len = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(len, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(len, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward() { fftw_execute(fwd_); }
  // Unnormalized inverse.
  void backward() { fftw_execute(bwd_); }

  std::vector<cplx> data;

 private:
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

long mode(std::size_t i, std::size_t n) {
  return i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

std::size_t steps_for(double t, double dt) {
  const double s = std::round(t / dt);
  if (std::abs(s * dt - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw Error(ErrorKind::Input, "evolve: time " + std::to_string(t) + " is not a multiple of dt");
  }
  return static_cast<std::size_t>(s);
}

double edge_max(const Field& f, const EvolveConfig& cfg) {
  const double edge = (1.0 - cfg.edge_fraction) * cfg.X;
  double m = 0.0;
  for (std::size_t j = 0; j < f.x.size(); ++j) {
    if (std::abs(f.x[j]) >= edge) m = std::max(m, std::abs(f.q[j]));
  }
  return m;
}

double max_abs(const std::vector<cplx>& q) {
  double m = 0.0;
  for (const cplx& v : q) m = std::max(m, std::abs(v));
  return m;
}

void nonlinear_step(std::vector<cplx>& q, double sigma, double dt) {
  const std::size_t n = q.size();
  const cplx c = 2.0 * kI * sigma;
  auto rhs = [&](cplx u, cplx v, cplx& du, cplx& dv) {
    du = c * u * u * std::conj(v);
    dv = c * v * v * std::conj(u);
  };
  for (std::size_t j = 0; j <= n / 2; ++j) {
    const std::size_t k = (n - j) % n;
    const cplx u = q[j];
    const cplx v = q[k];
    cplx k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    rhs(u, v, k1u, k1v);
    rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, k2u, k2v);
    rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, k3u, k3v);
    rhs(u + dt * k3u, v + dt * k3v, k4u, k4v);
    q[j] = u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    q[k] = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
}

}  // namespace

void EvolveConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Input, "evolve config: " + what); };
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(T > 0.0)) fail("T must be positive");
  if (!(X > 0.0)) fail("X must be positive");
  if (!power_of_two(N) || N < 16) fail("N must be a power of two >= 16");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) fail("dealias_fraction must be in (0, 1]");
  if (!(filter_cutoff >= 0.0)) fail("filter_cutoff must be >= 0");
  if (filter_order < 2 || filter_order % 2 != 0) fail("filter_order must be even and >= 2");
  if (!(boundary_tol > 0.0)) fail("boundary_tol must be positive");
  if (!(edge_fraction > 0.0 && edge_fraction < 0.5)) fail("edge_fraction must be in (0, 0.5)");
  if (!(blowup_factor > 1.0)) fail("blowup_factor must exceed 1");
  if (dt > kStabilityBudget * dx() * dx()) {
    fail("dt exceeds the stability budget " + std::to_string(kStabilityBudget) + " dx^2");
  }
  steps_for(T, dt);
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= T)) fail("snapshot time outside [0, T]");
    steps_for(t, dt);
  }
}

Field initial_field(const InitialProfile& q0, const EvolveConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.N;
  const double dx = cfg.dx();
  Field f;
  f.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) f.x[j] = -cfg.X + dx * static_cast<double>(j);
  f.q.assign(n, 0.0);
  if (q0.is_zero()) return f;

  // Coefficients C_m of q_j = sum_m C_m e^{2 pi i m j / n}.
  Fft fft(n);
  if (q0.kind() == ProfileKind::Box) {
    const cplx H = q0.H();
    const double L = q0.L();
    for (std::size_t i = 0; i < n; ++i) {
      const long m = mode(i, n);
      const double kappa = kPi * static_cast<double>(m) / cfg.X;
      // int_0^L H e^{-i kappa x} dx
      const cplx c = m == 0 ? H * L : H * (1.0 - std::exp(-kI * kappa * L)) / (kI * kappa);
      fft.data[i] = (m % 2 == 0 ? 1.0 : -1.0) * c / (2.0 * cfg.X);
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) fft.data[j] = q0(f.x[j]);
    fft.forward();
    for (cplx& v : fft.data) v /= static_cast<double>(n);
  }
  fft.data[n / 2] = 0.0;  // Nyquist mode
  if (cfg.filter_cutoff > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double kappa = kPi * static_cast<double>(mode(i, n)) / cfg.X;
      fft.data[i] *= std::exp(-std::pow(std::abs(kappa) / cfg.filter_cutoff, cfg.filter_order));
    }
  }
  fft.backward();
  f.q = fft.data;
  return f;
}

Trajectory evolve(const InitialProfile& q0, const EvolveConfig& cfg) {
  return evolve_field(initial_field(q0, cfg), q0.sigma(), cfg);
}

Trajectory evolve_field(const Field& start, int sigma, const EvolveConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.N;
  if (start.q.size() != n || start.x.size() != n) {
    throw Error(ErrorKind::Input, "evolve: field size does not match N");
  }
  Trajectory traj;
  traj.cfg = cfg;
  traj.sigma = sigma;
  traj.diag.initial_amplitude = max_abs(start.q);
  traj.diag.max_amplitude = traj.diag.initial_amplitude;
  traj.diag.max_boundary = edge_max(start, cfg);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(start.q[j]) > 1e-8 * traj.diag.initial_amplitude) {
      traj.diag.initial_support = std::max(traj.diag.initial_support, std::abs(start.x[j]));
    }
  }
  if (traj.diag.max_boundary > cfg.boundary_tol) {
    throw Error(ErrorKind::Boundary, "evolve: initial data not decayed at the edges");
  }

  const std::size_t total = steps_for(cfg.T, cfg.dt);
  std::vector<std::size_t> marks;
  for (double t : cfg.snapshot_times) marks.push_back(steps_for(t, cfg.dt));
  marks.push_back(total);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  // Half-step propagator with the dealiasing mask folded in.
  std::vector<cplx> half(n);
  const double keep = cfg.dealias_fraction * static_cast<double>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const long m = mode(i, n);
    const double kappa = kPi * static_cast<double>(m) / cfg.X;
    const bool kept = std::abs(static_cast<double>(m)) <= keep && i != n / 2;
    half[i] = kept ? std::exp(-kI * kappa * kappa * 0.5 * cfg.dt) / static_cast<double>(n) : 0.0;
  }

  Fft fft(n);
  Field cur = start;
  traj.snapshots.push_back(cur);
  if (marks.front() == 0) marks.erase(marks.begin());
  const double s = static_cast<double>(sigma);
  auto linear = [&]() {
    fft.forward();
    for (std::size_t i = 0; i < n; ++i) fft.data[i] *= half[i];
    fft.backward();
  };

  fft.data = cur.q;
  std::size_t next = 0;
  for (std::size_t step = 1; step <= total; ++step) {
    linear();
    nonlinear_step(fft.data, s, cfg.dt);
    linear();
    cur.q = fft.data;
    cur.t = start.t + static_cast<double>(step) * cfg.dt;

    const double amp = max_abs(cur.q);
    traj.diag.max_amplitude = std::max(traj.diag.max_amplitude, amp);
    traj.diag.max_boundary = std::max(traj.diag.max_boundary, edge_max(cur, cfg));
    traj.diag.steps = step;
    if (!std::isfinite(amp) || amp > cfg.blowup_factor * traj.diag.initial_amplitude) {
      throw Error(ErrorKind::BlowUp, "evolve: max|q| grew beyond the blow-up factor at t = " +
                                         std::to_string(cur.t));
    }
    if (traj.diag.max_boundary > cfg.boundary_tol) {
      throw Error(ErrorKind::Boundary,
                  "evolve: |q| reached the edge band at t = " + std::to_string(cur.t));
    }
    if (next < marks.size() && step == marks[next]) {
      traj.snapshots.push_back(cur);
      ++next;
    }
  }
  return traj;
}

std::vector<std::pair<double, cplx>> ray_probe(const Trajectory& traj, double xi) {
  const EvolveConfig& cfg = traj.cfg;
  const double t_end = traj.snapshots.empty() ? 0.0 : traj.snapshots.back().t;
  if (4.0 * std::abs(xi) * t_end + traj.diag.initial_support >= (1.0 - cfg.edge_fraction) * cfg.X) {
    throw Error(ErrorKind::Domain, "ray_probe: ray leaves the safe window");
  }
  std::vector<std::pair<double, cplx>> out;
  const double dx = cfg.dx();
  const long n = static_cast<long>(cfg.N);
  for (const Field& f : traj.snapshots) {
    const double x = 4.0 * xi * f.t;
    const double pos = (x + cfg.X) / dx;
    const long j = static_cast<long>(std::floor(pos));
    const double u = pos - static_cast<double>(j);
    auto at = [&](long i) { return f.q[static_cast<std::size_t>(((i % n) + n) % n)]; };
    // Lagrange weights on nodes j-1, j, j+1, j+2.
    const double w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
    out.emplace_back(f.t, w0 * at(j - 1) + w1 * at(j) + w2 * at(j + 1) + w3 * at(j + 2));
  }
  return out;
}

InitialProfile field_profile(const Field& f, int sigma, int factor, double crop_tol) {
  const std::size_t n = f.q.size();
  if (!power_of_two(n) || factor < 1) throw Error(ErrorKind::Input, "field_profile: bad size");
  const std::size_t m = n * static_cast<std::size_t>(factor);
  const double X = -f.x.front();
  const double dx = 2.0 * X / static_cast<double>(m);

  Fft small(n);
  small.data = f.q;
  small.forward();
  Fft big(m);
  std::fill(big.data.begin(), big.data.end(), cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (i == n / 2) continue;
    const long k = mode(i, n);
    const std::size_t dst = k >= 0 ? static_cast<std::size_t>(k) : m - static_cast<std::size_t>(-k);
    big.data[dst] = small.data[i] / static_cast<double>(n);
  }
  big.backward();

  const double qmax = max_abs(big.data);
  const std::size_t mid = m / 2;  // x = 0
  std::size_t half = 1;
  for (std::size_t l = 0; l < m; ++l) {
    if (std::abs(big.data[l]) > crop_tol * qmax) {
      const std::size_t d = l > mid ? l - mid : mid - l;
      half = std::max(half, d + 1);
    }
  }
  half = std::min(half, mid);
  std::vector<cplx> values(2 * half + 1);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = big.data[(mid - half + i) % m];
  const double w = dx * static_cast<double>(half);
  return InitialProfile::sampled(w, std::move(values), sigma, std::max(1e-10, 2.0 * crop_tol * qmax));
}

double fit_decay_slope(const std::vector<std::pair<double, cplx>>& series, double t_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [t, q] : series) {
    if (t < t_min) continue;
    if (t <= 0.0 || q == cplx(0.0)) throw Error(ErrorKind::Domain, "fit_decay_slope: vanishing sample");
    const double lx = std::log(t);
    const double ly = std::log(std::abs(q));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (n < 2 || den <= 0.0) throw Error(ErrorKind::Domain, "fit_decay_slope: fewer than two times");
  return (dn * sxy - sx * sy) / den;
}

void write_field_csv(std::ostream& out, const Field& f) {
  out << "x,re_q,im_q\n";
  char buf[160];
  for (std::size_t j = 0; j < f.q.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.x[j], f.q[j].real(), f.q[j].imag());
    out << buf;
  }
}

std::string field_sidecar_json(const Field& f, const EvolveConfig& cfg, const EvolveDiagnostics& d) {
  nlohmann::json j;
  j["t"] = f.t;
  j["cfg"] = {{"dt", cfg.dt},
              {"T", cfg.T},
              {"X", cfg.X},
              {"N", cfg.N},
              {"dealias_fraction", cfg.dealias_fraction},
              {"filter_cutoff", cfg.filter_cutoff},
              {"filter_order", cfg.filter_order},
              {"boundary_tol", cfg.boundary_tol},
              {"edge_fraction", cfg.edge_fraction},
              {"blowup_factor", cfg.blowup_factor}};
  j["diagnostics"] = {{"steps", d.steps},
                      {"max_boundary", d.max_boundary},
                      {"max_amplitude", d.max_amplitude},
                      {"initial_amplitude", d.initial_amplitude},
                      {"initial_support", d.initial_support},
                      {"max_abs_q", max_abs(f.q)}};
  return j.dump(2);
}

}  // namespace nnls
