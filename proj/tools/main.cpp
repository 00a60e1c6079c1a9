#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "commands.hpp"

using namespace nnls;
using namespace nnls::cli;

int main(int argc, char** argv) {
  CLI::App app{"Long-time asymptotics of the nonlocal NLS equation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  bool override_gates = false;
  int threads = 0;
  app.add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides [run] out)");
  app.add_flag("--override-gates", override_gates, "run even when the gates fail; watermarks outputs");
  app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  using Command = int (*)(const Context&);
  const std::pair<const char*, Command> table[] = {
      {"scatter", cmd_scatter},   {"gates", cmd_gates},   {"rays", cmd_rays},
      {"compare", cmd_compare},   {"model-verify", cmd_model_verify}, {"evolve", cmd_evolve},
  };
  const char* help[] = {
      "spectral functions a1, a2, b on the k grid",
      "solitonless and argument gates",
      "nu, chi, p along a list of rays",
      "PDE integration against the asymptotic formula",
      "model parabolic-cylinder problem checks",
      "integrate the equation and write snapshots",
  };
  for (std::size_t i = 0; i < std::size(table); ++i) app.add_subcommand(table[i].first, help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  std::unique_ptr<tbb::global_control> limit;
  if (threads > 0) {
    limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                  static_cast<std::size_t>(threads));
  }

  try {
    Context ctx;
    ctx.cfg = load_config(config_path);
    ctx.out_dir = out_dir.empty() ? ctx.cfg.out_dir : out_dir;
    ctx.override_gates = override_gates;
    ctx.log = &std::cout;
    std::cout << "config_hash=" << ctx.cfg.hash << '\n';
    for (const auto& [name, fn] : table) {
      if (app.got_subcommand(name)) return fn(ctx);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}
