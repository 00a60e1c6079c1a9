#include "run_config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nnls/errors.hpp"

namespace nnls::cli {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::Input, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad(key + ": not a number: '" + raw + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    bad(key + ": not an integer: '" + raw + "'");
  }
  return out;
}

std::size_t to_count(const std::string& key, const std::string& raw) {
  const long long v = to_integer(key, raw);
  if (v < 0) bad(key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) bad(key + ": empty list");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"run", {"seed", "out"}},
      {"profile", {"kind", "sigma", "H", "H_im", "L", "file"}},
      {"grid", {"k_max", "nodes"}},
      {"rays", {"xi", "xi_min", "xi_max", "xi_count"}},
      {"evolution",
       {"dt", "T", "X", "N", "dealias_fraction", "filter_cutoff", "filter_order", "boundary_tol",
        "edge_fraction", "blowup_factor", "snapshot_times", "snapshot_start", "snapshot_every"}},
      {"compare", {"fit_t_min", "slope_tol"}},
      {"scatter", {"tolerance"}},
      {"model", {"source", "count"}},
  };
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    bad(std::string("config: ") + e.what());
  }

  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) bad("config: key '" + section + "' outside a section");
    const auto it = schema().find(section);
    if (it == schema().end()) bad("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) bad("config: unknown key '" + key + "' in [" + section + "]");
      kv[section + "." + key] = value.data();
    }
  }
  auto get = [&](const std::string& key) -> const std::string* {
    const auto f = kv.find(key);
    return f == kv.end() ? nullptr : &f->second;
  };

  RunConfig c;
  if (auto v = get("run.seed")) c.seed = static_cast<unsigned>(to_count("run.seed", *v));
  if (auto v = get("run.out")) c.out_dir = trim(*v);

  if (auto v = get("profile.kind")) c.profile.kind = trim(*v);
  if (c.profile.kind != "zero" && c.profile.kind != "box" && c.profile.kind != "file") {
    bad("profile.kind: expected zero, box or file");
  }
  if (auto v = get("profile.sigma")) c.profile.sigma = static_cast<int>(to_integer("profile.sigma", *v));
  if (c.profile.sigma != 1 && c.profile.sigma != -1) bad("profile.sigma: must be 1 or -1");
  if (auto v = get("profile.H")) c.profile.H_re = to_double("profile.H", *v);
  if (auto v = get("profile.H_im")) c.profile.H_im = to_double("profile.H_im", *v);
  if (auto v = get("profile.L")) c.profile.L = to_double("profile.L", *v);
  if (c.profile.kind == "box" && !(c.profile.L > 0.0)) bad("profile.L: must be positive");
  if (auto v = get("profile.file")) {
    std::filesystem::path p(trim(*v));
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    c.profile.file = p.string();
  }
  if (c.profile.kind == "file") {
    if (c.profile.file.empty()) bad("profile.file: required for kind = file");
    c.profile.file_digest = sha256_hex(read_file(c.profile.file));
  }

  if (auto v = get("grid.k_max")) c.k_max = to_double("grid.k_max", *v);
  if (auto v = get("grid.nodes")) c.nodes = to_count("grid.nodes", *v);
  if (!(c.k_max > 0.0) || c.nodes < 5) bad("grid: need k_max > 0 and nodes >= 5");

  if (auto v = get("rays.xi")) {
    if (get("rays.xi_min") || get("rays.xi_max") || get("rays.xi_count")) {
      bad("rays: give either xi or xi_min/xi_max/xi_count");
    }
    c.xi = to_list("rays.xi", *v);
  } else if (get("rays.xi_min") || get("rays.xi_max") || get("rays.xi_count")) {
    if (!get("rays.xi_min") || !get("rays.xi_max") || !get("rays.xi_count")) {
      bad("rays: xi_min, xi_max and xi_count go together");
    }
    const double lo = to_double("rays.xi_min", *get("rays.xi_min"));
    const double hi = to_double("rays.xi_max", *get("rays.xi_max"));
    const std::size_t n = to_count("rays.xi_count", *get("rays.xi_count"));
    if (n < 1 || hi < lo) bad("rays: need xi_count >= 1 and xi_max >= xi_min");
    c.xi = n == 1 ? std::vector<double>{lo} : linspace(lo, hi, n);
  }

  EvolveConfig& e = c.evolution;
  if (auto v = get("evolution.dt")) e.dt = to_double("evolution.dt", *v);
  if (auto v = get("evolution.T")) e.T = to_double("evolution.T", *v);
  if (auto v = get("evolution.X")) e.X = to_double("evolution.X", *v);
  if (auto v = get("evolution.N")) e.N = to_count("evolution.N", *v);
  if (auto v = get("evolution.dealias_fraction")) e.dealias_fraction = to_double("evolution.dealias_fraction", *v);
  if (auto v = get("evolution.filter_cutoff")) e.filter_cutoff = to_double("evolution.filter_cutoff", *v);
  if (auto v = get("evolution.filter_order")) {
    e.filter_order = static_cast<int>(to_integer("evolution.filter_order", *v));
  }
  if (auto v = get("evolution.boundary_tol")) e.boundary_tol = to_double("evolution.boundary_tol", *v);
  if (auto v = get("evolution.edge_fraction")) e.edge_fraction = to_double("evolution.edge_fraction", *v);
  if (auto v = get("evolution.blowup_factor")) e.blowup_factor = to_double("evolution.blowup_factor", *v);
  if (auto v = get("evolution.snapshot_times")) e.snapshot_times = to_list("evolution.snapshot_times", *v);
  if (auto v = get("evolution.snapshot_start")) c.snapshot_start = to_double("evolution.snapshot_start", *v);
  if (auto v = get("evolution.snapshot_every")) c.snapshot_every = to_double("evolution.snapshot_every", *v);
  if (c.snapshot_every < 0.0) bad("evolution.snapshot_every: must be non-negative");
  if (c.snapshot_every > 0.0) {
    for (long j = 0;; ++j) {
      const double t = c.snapshot_start + static_cast<double>(j) * c.snapshot_every;
      if (t > e.T * (1.0 + 1e-12)) break;
      if (t > 0.0) e.snapshot_times.push_back(t);
    }
  }
  e.validate();

  if (auto v = get("compare.fit_t_min")) c.fit_t_min = to_double("compare.fit_t_min", *v);
  if (auto v = get("compare.slope_tol")) c.slope_tol = to_double("compare.slope_tol", *v);
  if (auto v = get("scatter.tolerance")) c.property_tol = to_double("scatter.tolerance", *v);
  if (auto v = get("model.source")) c.model_source = trim(*v);
  if (c.model_source != "rays" && c.model_source != "random") bad("model.source: expected rays or random");
  if (auto v = get("model.count")) c.model_count = to_count("model.count", *v);

  std::ostringstream k;
  k << "compare.fit_t_min=" << fmt(c.fit_t_min) << "\n"
    << "compare.slope_tol=" << fmt(c.slope_tol) << "\n"
    << "evolution.T=" << fmt(e.T) << "\n"
    << "evolution.X=" << fmt(e.X) << "\n"
    << "evolution.N=" << e.N << "\n"
    << "evolution.blowup_factor=" << fmt(e.blowup_factor) << "\n"
    << "evolution.boundary_tol=" << fmt(e.boundary_tol) << "\n"
    << "evolution.dealias_fraction=" << fmt(e.dealias_fraction) << "\n"
    << "evolution.dt=" << fmt(e.dt) << "\n"
    << "evolution.edge_fraction=" << fmt(e.edge_fraction) << "\n"
    << "evolution.filter_cutoff=" << fmt(e.filter_cutoff) << "\n"
    << "evolution.filter_order=" << e.filter_order << "\n"
    << "evolution.snapshot_times=" << fmt_list(e.snapshot_times) << "\n"
    << "grid.k_max=" << fmt(c.k_max) << "\n"
    << "grid.nodes=" << c.nodes << "\n"
    << "model.count=" << c.model_count << "\n"
    << "model.source=" << c.model_source << "\n"
    << "profile.H=" << fmt(c.profile.H_re) << "," << fmt(c.profile.H_im) << "\n"
    << "profile.L=" << fmt(c.profile.L) << "\n"
    << "profile.file_sha256=" << c.profile.file_digest << "\n"
    << "profile.kind=" << c.profile.kind << "\n"
    << "profile.sigma=" << c.profile.sigma << "\n"
    << "rays.xi=" << fmt_list(c.xi) << "\n"
    << "run.seed=" << c.seed << "\n"
    << "scatter.tolerance=" << fmt(c.property_tol) << "\n";
  c.canonical = k.str();
  c.hash = sha256_hex(c.canonical).substr(0, 16);
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(read_file(path), base);
}

InitialProfile read_sample_file(const std::string& path, int sigma) {
  std::ifstream in(path);
  if (!in) bad("cannot open sample file " + path);
  std::vector<double> x;
  std::vector<cplx> v;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) cols.push_back(item);
    const std::string where = path + ":" + std::to_string(lineno);
    if (!header_seen && x.empty() && !cols.empty()) {
      double probe = 0;
      const std::string c0 = trim(cols[0]);
      const auto [ptr, ec] = std::from_chars(c0.data(), c0.data() + c0.size(), probe);
      if (ec != std::errc() || ptr != c0.data() + c0.size()) {
        header_seen = true;
        continue;
      }
    }
    if (cols.size() != 3) bad(where + ": expected 3 columns x,re_q,im_q");
    x.push_back(to_double(where, cols[0]));
    v.emplace_back(to_double(where, cols[1]), to_double(where, cols[2]));
  }
  const std::size_t n = x.size();
  if (n < 5 || n % 2 == 0) bad(path + ": need an odd number (>= 5) of samples");
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  if (!(h > 0.0)) bad(path + ": x must increase");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(x[j] - (x.front() + static_cast<double>(j) * h)) > 1e-9 * std::max(1.0, std::abs(x[j]))) {
      bad(path + ": x grid is not uniform");
    }
  }
  if (std::abs(x.front() + x.back()) > 1e-9 * std::abs(x.back())) bad(path + ": x grid is not symmetric about 0");
  return InitialProfile::sampled(x.back(), std::move(v), sigma);
}

InitialProfile make_profile(const RunConfig& cfg) {
  const ProfileSpec& p = cfg.profile;
  if (p.kind == "box") return InitialProfile::box(cplx(p.H_re, p.H_im), p.L, p.sigma);
  if (p.kind == "file") return read_sample_file(p.file, p.sigma);
  return InitialProfile::zero(p.sigma);
}

}  // namespace nnls::cli
