#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nnls/asymptotics.hpp"
#include "nnls/evolution.hpp"
#include "nnls/model_rhp.hpp"
#include "nnls/rh_data.hpp"

namespace nnls::cli {

namespace {

using json = nlohmann::json;

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path out_path(const Context& ctx, const std::string& name) {
  return std::filesystem::path(ctx.out_dir) / name;
}

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  std::ofstream out(out_path(ctx, name), std::ios::binary);
  if (!out) throw Error(ErrorKind::Input, "cannot write " + out_path(ctx, name).string());
  return out;
}

std::ofstream open_csv(const Context& ctx, const std::string& name, bool watermark) {
  std::ofstream out = open_out(ctx, name);
  out << "# config_hash=" << ctx.cfg.hash << '\n';
  if (watermark) out << "# gates_overridden=1\n";
  return out;
}

void write_json(const Context& ctx, const std::string& name, const std::string& command, json body,
                bool watermark) {
  body["command"] = command;
  body["config_hash"] = ctx.cfg.hash;
  body["created"] = utc_now();
  body["gates_overridden"] = watermark;
  std::ofstream out = open_out(ctx, name);
  out << body.dump(2) << '\n';
}

void say(const Context& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

struct GateOutcome {
  std::optional<ReflectionData> refl;
  GateReport report;
  std::string failure;
  bool passed() const { return refl && report.passed(); }
};

std::string describe_failure(const GateReport& r) {
  if (!r.note.empty()) return r.note;
  std::string s;
  if (!r.gate_i) s = "zeros: a1 " + std::to_string(r.zeros_a1) + ", a2 " + std::to_string(r.zeros_a2);
  if (!r.gate_ii) s += std::string(s.empty() ? "" : "; ") + "max |arg w| reaches pi";
  return s;
}

GateOutcome evaluate_gates(const InitialProfile& q0, const RunConfig& cfg) {
  GateOutcome g;
  try {
    g.refl = reflect_profile(q0, cfg.k_max, cfg.nodes);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroOnGrid && e.kind() != ErrorKind::PhaseStep) throw;
    g.failure = e.what();
    return g;
  }
  g.report = gate_assumptions(q0, *g.refl);
  if (!g.report.passed()) g.failure = describe_failure(g.report);
  return g;
}

json gate_json(const GateOutcome& g) {
  const GateReport& r = g.report;
  json j;
  j["passed"] = g.passed();
  j["zeros_a1"] = r.zeros_a1;
  j["zeros_a2"] = r.zeros_a2;
  j["gate_i"] = r.gate_i;
  j["max_abs_arg_w"] = r.max_abs_arg;
  j["gate_ii"] = r.gate_ii;
  j["l1_norm"] = r.l1_norm;
  j["l1_gate"] = r.l1_gate;
  j["i0_value"] = r.i0_value;
  j["i0_gate"] = r.i0_gate;
  j["grid_spacing"] = r.grid_spacing;
  j["note"] = g.failure;
  return j;
}

std::string gate_line(const GateOutcome& g) {
  if (g.passed()) return "gates: pass";
  return "gates: fail (" + g.failure + ")";
}

/// Returns an exit code when the command has to stop, nothing otherwise.
std::optional<int> require_gates(const Context& ctx, const GateOutcome& g) {
  say(ctx, gate_line(g));
  if (g.passed()) return std::nullopt;
  if (!ctx.override_gates) {
    say(ctx, "refusing: the asymptotic formula does not apply (use --override-gates to force)");
    return kGateRefusal;
  }
  if (!g.refl) {
    say(ctx, "no reflection data: " + g.failure);
    return kNumericalFailure;
  }
  say(ctx, "warning: gates overridden, outputs are watermarked");
  return std::nullopt;
}

std::vector<double> ray_list(const RunConfig& cfg) {
  return cfg.xi.empty() ? linspace(-3.0, 3.0, 61) : cfg.xi;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Input:
    case ErrorKind::Domain:
    case ErrorKind::NonDecayed:
      return kInputError;
    case ErrorKind::Assumption:
      return kGateRefusal;
    default:
      return kNumericalFailure;
  }
}

int cmd_scatter(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const InitialProfile q0 = make_profile(cfg);
  const SpectralData s = scatter(q0, symmetric_grid(cfg.k_max, cfg.nodes));
  const PropertyReport prop = check_properties(s);
  {
    std::ofstream out = open_csv(ctx, "spectral.csv", false);
    write_spectral_csv(out, s);
  }
  GateOutcome g;
  try {
    g.refl = reflect(s);
    g.report = gate_assumptions(q0, *g.refl);
    if (!g.report.passed()) g.failure = describe_failure(g.report);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroOnGrid && e.kind() != ErrorKind::PhaseStep) throw;
    g.failure = e.what();
  }
  const bool ok = prop.max() <= cfg.property_tol;
  json j;
  j["nodes"] = s.k.size();
  j["k_max"] = cfg.k_max;
  j["properties"] = {{"symmetry", prop.symmetry},
                     {"determinant", prop.determinant},
                     {"tail", prop.tail},
                     {"tail_monotone", prop.tail_monotone},
                     {"tolerance", cfg.property_tol},
                     {"passed", ok}};
  j["gates"] = gate_json(g);
  write_json(ctx, "scatter.json", "scatter", j, false);
  say(ctx, "properties: " + std::string(ok ? "pass" : "fail") + fmt(" (max violation %.3e)", prop.max()));
  say(ctx, gate_line(g));
  return ok ? kOk : kNumericalFailure;
}

int cmd_gates(const Context& ctx) {
  const InitialProfile q0 = make_profile(ctx.cfg);
  const GateOutcome g = evaluate_gates(q0, ctx.cfg);
  write_json(ctx, "gates.json", "gates", {{"gates", gate_json(g)}}, false);
  say(ctx, gate_line(g));
  return kOk;
}

int cmd_rays(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const InitialProfile q0 = make_profile(cfg);
  const GateOutcome g = evaluate_gates(q0, cfg);
  if (auto stop = require_gates(ctx, g)) return *stop;
  const bool mark = !g.passed();

  std::vector<RayData> rays;
  json skipped = json::array();
  for (double xi : ray_list(cfg)) {
    try {
      RayData ray = ray_at(*g.refl, xi);
      ray.p = p_amplitude(ray);
      rays.push_back(ray);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Assumption || !ctx.override_gates) throw;
      skipped.push_back({{"xi", xi}, {"reason", e.what()}});
    }
  }
  {
    std::ofstream out = open_csv(ctx, "rays.csv", mark);
    write_ray_csv(out, rays, g.report);
  }
  write_json(ctx, "rays.json", "rays", {{"gates", gate_json(g)}, {"rays", rays.size()}, {"skipped", skipped}}, mark);
  say(ctx, std::to_string(rays.size()) + " rays written");
  return kOk;
}

int cmd_compare(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.xi.empty()) throw Error(ErrorKind::Input, "compare: [rays] xi is required");
  const InitialProfile q0 = make_profile(cfg);
  const GateOutcome g = evaluate_gates(q0, cfg);
  if (auto stop = require_gates(ctx, g)) return *stop;
  const bool mark = !g.passed();

  std::ofstream csv = open_csv(ctx, "compare.csv", mark);
  csv << "xi,t,abs_pde,abs_asym,ratio,phase_mismatch\n";
  json summary = json::array();
  bool all_pass = true;

  if (!q0.is_zero()) {
    const Trajectory traj = evolve(q0, cfg.evolution);
    std::vector<std::pair<double, double>> slopes;  // fitted, predicted
    for (double xi : cfg.xi) {
      const auto series = ray_probe(traj, xi);
      double ratio = 0.0;
      double phase = 0.0;
      char buf[256];
      for (const auto& [t, q] : series) {
        if (t < 1.0) continue;
        const AsymptoticPrediction a = predict(*g.refl, 4.0 * xi * t, t);
        ratio = std::abs(q) / std::abs(a.q_leading);
        phase = std::arg(q / a.q_leading);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", xi, t, std::abs(q),
                      std::abs(a.q_leading), ratio, phase);
        csv << buf;
      }
      const double fitted = fit_decay_slope(series, cfg.fit_t_min);
      const RayData ray = ray_at(*g.refl, xi);
      const double predicted = -0.5 + ray.nu.imag();
      const bool pass = std::abs(fitted - predicted) <= cfg.slope_tol;
      all_pass = all_pass && pass;
      slopes.emplace_back(fitted, predicted);
      summary.push_back({{"xi", xi},
                         {"im_nu", ray.nu.imag()},
                         {"fitted_slope", fitted},
                         {"predicted_slope", predicted},
                         {"slope_error", fitted - predicted},
                         {"ratio_at_T", ratio},
                         {"phase_at_T", phase},
                         {"passed", pass}});
      say(ctx, "xi " + fmt("%.4g", xi) + ": slope " + fmt("%.4f", fitted) + " predicted " + fmt("%.4f", predicted) +
                   " ratio " + fmt("%.4f", ratio));
    }
    json pairs = json::array();
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      for (std::size_t j = i + 1; j < slopes.size(); ++j) {
        const double fd = slopes[i].first - slopes[j].first;
        const double pd = slopes[i].second - slopes[j].second;
        pairs.push_back({{"i", i}, {"j", j}, {"fitted_difference", fd}, {"predicted_difference", pd}});
      }
    }
    json j;
    j["rays"] = summary;
    j["pairwise"] = pairs;
    j["passed"] = all_pass;
    j["gates"] = gate_json(g);
    j["evolution"] = json::parse(field_sidecar_json(traj.snapshots.back(), cfg.evolution, traj.diag));
    j["fit_t_min"] = cfg.fit_t_min;
    write_json(ctx, "compare.json", "compare", j, mark);
  } else {
    write_json(ctx, "compare.json", "compare",
               {{"rays", summary}, {"pairwise", json::array()}, {"passed", true}, {"gates", gate_json(g)}}, mark);
    say(ctx, "zero profile: nothing to compare");
  }
  say(ctx, std::string("compare: ") + (all_pass ? "pass" : "fail"));
  return kOk;
}

int cmd_model_verify(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<ModelCoefficients> sets;
  if (cfg.model_source == "random") {
    sets = random_coefficients(cfg.model_count, cfg.seed);
  } else {
    const InitialProfile q0 = make_profile(cfg);
    const ReflectionData r = reflect_profile(q0, cfg.k_max, cfg.nodes);
    const std::vector<double> xs = cfg.xi.empty() ? linspace(-1.0, 1.0, cfg.model_count) : cfg.xi;
    for (double xi : xs) sets.push_back(beta_gamma(ray_at(r, xi), r.sigma));
  }
  std::ofstream csv = open_csv(ctx, "model.csv", false);
  csv << "index,xi,sigma,re_nu,im_nu,ode,jump,beta_gamma_product,det_drift,normalization_slope,beta_extraction,"
         "gamma_extraction\n";
  json reports = json::array();
  char buf[512];
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const ModelCoefficients& c = sets[i];
    const ModelReport rep = verify_model(c);
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%.17g,%.17g,%.6e,%.6e,%.6e,%.6e,%.6f,%.6e,%.6e\n", i, c.xi, c.sigma,
                  c.nu.real(), c.nu.imag(), rep.ode_residual, rep.jump_residual, rep.product_residual, rep.det_drift,
                  rep.normalization_slope, rep.beta_extraction, rep.gamma_extraction);
    csv << buf;
    std::ostringstream os;
    write_model_report_json(os, c, rep);
    reports.push_back(json::parse(os.str()));
  }
  write_json(ctx, "model.json", "model-verify", {{"source", cfg.model_source}, {"sets", reports}}, false);
  say(ctx, std::to_string(sets.size()) + " coefficient sets verified");
  return kOk;
}

int cmd_evolve(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const InitialProfile q0 = make_profile(cfg);
  const Trajectory traj = evolve(q0, cfg.evolution);
  json files = json::array();
  char name[64];
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Field& f = traj.snapshots[i];
    std::snprintf(name, sizeof name, "snapshot_%04zu", i);
    {
      std::ofstream out = open_csv(ctx, std::string(name) + ".csv", false);
      write_field_csv(out, f);
    }
    write_json(ctx, std::string(name) + ".json", "evolve", json::parse(field_sidecar_json(f, cfg.evolution, traj.diag)),
               false);
    files.push_back({{"t", f.t}, {"csv", std::string(name) + ".csv"}, {"sidecar", std::string(name) + ".json"}});
  }
  write_json(ctx, "manifest.json", "evolve",
             {{"sigma", traj.sigma},
              {"snapshots", files},
              {"steps", traj.diag.steps},
              {"max_boundary", traj.diag.max_boundary},
              {"max_amplitude", traj.diag.max_amplitude}},
             false);
  say(ctx, std::to_string(traj.snapshots.size()) + " snapshots written");
  return kOk;
}

}  // namespace nnls::cli
