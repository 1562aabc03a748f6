#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "nlsb/config.hpp"
#include "nlsb/radial.hpp"

namespace nlsb {

struct RunOptions {
  int jobs = 1;
  bool verbose = false;
  std::ostream* log = nullptr;  ///< progress lines when verbose
};

/// Runs fn(0..n-1) on up to `jobs` threads. fn must not throw.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Outcome of a command: exit status 0 when every row succeeded, otherwise the
/// exit code of the first recorded failure (1 for a failed check).
struct CommandStatus {
  int exit_code = 0;
  std::string message;
  void note(int code, const std::string& what);
};

struct GroundStateSummary {
  double center_value = 0.0;
  double decay_rate = 0.0;
  double ode_residual = 0.0;
  std::string profile_file;
};

GroundStateSummary cmd_groundstate(double v_a, double p, int dim, double r_max, double tol,
                                   const std::string& output_dir);

std::string field_path(const ExperimentConfig& cfg, double eps);

/// Continuation over the schedule; one field file per converged eps and solve.csv.
CommandStatus cmd_solve(const ExperimentConfig& cfg, const RunOptions& opts);

/// Reads the field files of cmd_solve and writes decomposition.csv, pohozaev.csv,
/// overlap.csv, coercivity.csv and rates.csv.
CommandStatus cmd_analyze(const ExperimentConfig& cfg, const RunOptions& opts);

/// Two perturbation pairs per eps (amplitude, shift); writes uniqueness.csv.
CommandStatus cmd_uniqueness(const ExperimentConfig& cfg, const RunOptions& opts);

/// Seeded unit direction used for the opposite center shifts.
Point shift_direction(std::uint64_t seed, int dim);

}  // namespace nlsb
