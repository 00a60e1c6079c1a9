#pragma once

#include <string>
#include <vector>

#include "nnls/evolution.hpp"
#include "nnls/scattering.hpp"

namespace nnls::cli {

struct ProfileSpec {
  std::string kind = "zero";  // zero | box | file
  int sigma = 1;
  double H_re = 0.0;
  double H_im = 0.0;
  double L = 1.0;
  std::string file;
  std::string file_digest;  // sha256 of the file contents
};

/// Effective settings of a run, after defaults. Every key of the config file
/// maps to one field here.
struct RunConfig {
  ProfileSpec profile;
  double k_max = 12.0;
  std::size_t nodes = 1201;
  std::vector<double> xi;
  EvolveConfig evolution;
  double snapshot_start = 0.0;
  double snapshot_every = 0.0;
  double fit_t_min = 20.0;
  double slope_tol = 0.05;
  double property_tol = 1e-6;
  std::string model_source = "rays";  // rays | random
  std::size_t model_count = 5;
  unsigned seed = 1;
  std::string out_dir = "out";

  std::string canonical;  // sorted key=value dump of the fields above
  std::string hash;       // leading 16 hex digits of sha256(canonical)
};

/// Strict INI reader: unknown sections or keys, duplicate keys and values that
/// do not parse completely are Error(Input).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& base_dir);

/// Sample file: rows "x,re_q,im_q" on a uniform grid symmetric about 0 with an
/// odd number of nodes; '#' lines and one header line are skipped.
InitialProfile read_sample_file(const std::string& path, int sigma);

InitialProfile make_profile(const RunConfig& cfg);

std::string sha256_hex(const std::string& data);

}  // namespace nnls::cli
