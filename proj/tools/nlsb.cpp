#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "nlsb/config.hpp"
#include "nlsb/experiment.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("NLSB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int report(const nlsb::CommandStatus& s, const char* name) {
  if (s.exit_code != 0) std::cerr << "nlsb " << name << ": " << s.message << '\n';
  return s.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concentrating bound states of -eps^2 Lap u + V u = |u|^(p-2) u"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = default_jobs();
  bool verbose = false;
  app.add_option("--config", config_path, "experiment config (key = value lines)");
  app.add_option("--jobs", jobs, "worker threads (default: NLSB_THREADS or hardware threads)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--verbose", verbose, "progress lines on stderr");

  double va = 1.0, p = 4.0, rmax = 0.0, tol = 0.0;
  int dim = 1;
  auto* gs = app.add_subcommand("groundstate", "radial ground state of -Lap U + v_a U = U^(p-1)");
  gs->add_option("--va", va, "linear coefficient v_a")->required();
  gs->add_option("--p", p, "nonlinearity exponent")->required();
  gs->add_option("--dim", dim, "space dimension")->required();
  gs->add_option("--rmax", rmax, "shooting radius (default 10/sqrt(v_a) + 10)");
  gs->add_option("--tol", tol, "relative bisection tolerance on u(0)");

  auto* solve = app.add_subcommand("solve", "continuation over the eps schedule");
  auto* analyze = app.add_subcommand("analyze", "decomposition, Pohozaev, overlap, coercivity and rate fits");
  auto* uniq = app.add_subcommand("uniqueness", "independent solves from perturbed initializers");
  auto* all = app.add_subcommand("all", "solve, analyze and uniqueness");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gs->parsed()) {
      const std::string dir = out_dir.empty() ? "." : out_dir;
      const auto s = nlsb::cmd_groundstate(va, p, dim, rmax, tol, dir);
      std::printf("u(0)=%.6f decay_rate=%.6f ode_residual=%.3e profile=%s\n", s.center_value, s.decay_rate,
                  s.ode_residual, s.profile_file.c_str());
      return 0;
    }
    if (config_path.empty()) {
      std::cerr << "nlsb: --config is required for this subcommand\n";
      return static_cast<int>(nlsb::ErrorKind::Config);
    }
    nlsb::ExperimentConfig cfg = nlsb::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const nlsb::RunOptions opts{jobs, verbose, &std::cerr};
    if (solve->parsed()) return report(nlsb::cmd_solve(cfg, opts), "solve");
    if (analyze->parsed()) return report(nlsb::cmd_analyze(cfg, opts), "analyze");
    if (uniq->parsed()) return report(nlsb::cmd_uniqueness(cfg, opts), "uniqueness");
    if (all->parsed()) {
      int code = report(nlsb::cmd_solve(cfg, opts), "solve");
      const int a = report(nlsb::cmd_analyze(cfg, opts), "analyze");
      const int u = report(nlsb::cmd_uniqueness(cfg, opts), "uniqueness");
      if (code == 0) code = a;
      if (code == 0) code = u;
      return code;
    }
  } catch (const nlsb::Error& e) {
    std::cerr << "nlsb: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "nlsb: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
