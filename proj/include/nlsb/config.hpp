#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsb/coercivity.hpp"
#include "nlsb/error.hpp"
#include "nlsb/point.hpp"
#include "nlsb/solver.hpp"

namespace nlsb {

struct WellConfig {
  Point center{};
  double depth = 1.0;
  double coeff = 1.0;
  bool operator==(const WellConfig&) const = default;
};

struct ProblemConfig {
  int dim = 2;
  double p = 3.0;
  double m = 2.0;
  double patch_radius = 0.49;
  double background = 0.0;  ///< 0 with wells: automatic; without wells: the constant potential
  std::vector<WellConfig> wells;
  bool operator==(const ProblemConfig&) const = default;
};

struct AnalysisConfig {
  double ball_radius = 0.0;  ///< 0: half the minimum well separation (1 for a single well)
  int sphere_points = 0;     ///< 0: quadrature default
  double fit_eps_min = 0.0;  ///< eps window used by the rate fits
  double fit_eps_max = 1e300;
  double decompose_tol = 1e-8;
  double overlap_q1 = 1.0;
  double overlap_q2 = 1.0;
  bool coercivity = true;
  double negative_threshold = 1e-2;
  bool operator==(const AnalysisConfig&) const = default;
};

struct UniquenessConfig {
  double amplitude_lo = 0.9;
  double amplitude_hi = 1.1;
  double shift = 0.3;  ///< center shift in units of eps, along a seeded random direction
  bool dump_xi = true;
  bool operator==(const UniquenessConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  GridRule grid;
  std::vector<double> eps_schedule{0.4, 0.3, 0.25, 0.2, 0.15};
  NewtonConfig solver;
  AnalysisConfig analysis;
  UniquenessConfig uniqueness;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool operator==(const ExperimentConfig&) const;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, std::string field, const std::string& what);
  int line() const { return line_; }  ///< 0 when the problem is not tied to one line
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Parses "key = value" lines; '#' starts a comment. Unset keys keep their
/// defaults. The result is validated against every module precondition.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Every key in a fixed order, floats with 17 significant digits.
std::string serialize_config(const ExperimentConfig& cfg);

/// Throws ConfigError naming the field at fault.
void validate_config(const ExperimentConfig& cfg);

PotentialModel make_potential(const ProblemConfig& problem);
ProblemTemplate make_template(const ExperimentConfig& cfg);

/// Ansatz bumps: one per well, or a single bump at the origin for a constant potential.
AnsatzSpec make_ansatz(const ExperimentConfig& cfg);

/// Shortest decimal that round-trips, as used in file names.
std::string format_shortest(double v);
/// 17 significant digits, locale independent.
std::string format_double(double v);

}  // namespace nlsb
