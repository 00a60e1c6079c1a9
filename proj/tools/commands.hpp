#pragma once

#include <iosfwd>
#include <string>

#include "nnls/errors.hpp"
#include "run_config.hpp"

namespace nnls::cli {

enum ExitCode { kOk = 0, kInputError = 2, kGateRefusal = 3, kNumericalFailure = 4 };

struct Context {
  RunConfig cfg;
  std::string out_dir;
  bool override_gates = false;
  std::ostream* log = nullptr;  // one-line progress and verdicts
};

int cmd_scatter(const Context& ctx);
int cmd_gates(const Context& ctx);
int cmd_rays(const Context& ctx);
int cmd_compare(const Context& ctx);
int cmd_model_verify(const Context& ctx);
int cmd_evolve(const Context& ctx);

/// Maps a library error onto the exit codes above.
int exit_code_for(const Error& e);

}  // namespace nnls::cli
