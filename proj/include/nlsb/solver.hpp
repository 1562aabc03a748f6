#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nlsb/error.hpp"
#include "nlsb/grid.hpp"
#include "nlsb/radial.hpp"

namespace nlsb {

struct Bump {
  std::shared_ptr<const RadialProfile> profile;
  Point center{};
  double amplitude = 1.0;
};

struct AnsatzSpec {
  std::vector<Bump> bumps;
};

/// One bump per well of the potential, centered at the well, unit amplitude,
/// with ground states for v_a = depth.
AnsatzSpec well_ansatz(const PotentialModel& pot, double p, const ShootingConfig& shooting = {});

/// Σ amplitude · U(|x − center| / ε).
ScalarField build_ansatz(const ProblemSpec& spec, const AnsatzSpec& ansatz);

struct NewtonConfig {
  double tol_residual = 1e-11;
  int max_newton = 30;
  double krylov_tol = 1e-10;
  int krylov_max = 3000;
  double damping = 1.0;      ///< initial step length
  double backtrack = 0.5;    ///< step reduction factor
  double min_step = 1.0 / 64.0;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
  double final_residual = 0.0;
  bool positivity = false;
  bool trivial = false;
  int krylov_iterations = 0;
};

struct SolveResult {
  ScalarField u;
  SolveReport report;
};

/// Newton failure that keeps the partial report and iterate.
class SolveError : public Error {
 public:
  SolveError(ErrorKind kind, const std::string& what, SolveResult partial)
      : Error(kind, what), partial_(std::move(partial)) {}
  const SolveResult& partial() const { return partial_; }

 private:
  SolveResult partial_;
};

/// F(u) = −ε²Δ_h u + V u − |u|^{p−2}u.
double residual_sup(const ProblemSpec& spec, const std::vector<double>& u);

/// Damped Newton with MINRES on the Jacobian J[u] = −ε²Δ_h + V − (p−1)|u|^{p−2},
/// preconditioned by the exact sine-transform inverse of −ε²Δ_h + min V.
SolveResult newton_solve(const ProblemSpec& spec, const ScalarField& u0, const NewtonConfig& cfg = {});

/// How a grid is derived from ε: spacing align / ceil(align · points_per_eps / ε)
/// so that multiples of align are nodes; box covers every well patch plus a
/// margin max(2δ + 5ε/√dmin, 10ε/√dmin) around each center.
struct GridRule {
  double points_per_eps = 16.0;
  double align = 1.0;
  double margin_decay_lengths = 10.0;  ///< box margin in units of ε / sqrt(min depth)
};

struct ProblemTemplate {
  PotentialModel potential;
  double p = 3.0;
  GridRule grid;
};

TensorGrid grid_for_eps(const ProblemTemplate& tpl, double eps);
ProblemSpec make_problem(const ProblemTemplate& tpl, double eps);

/// Multilinear interpolation, zero outside the box.
double interpolate(const ScalarField& u, const Point& x);

/// Resample onto a new grid with the bump scale changed from eps_old to eps_new
/// about the nearest of the given centers: u_new(x) = u_old(a + (x − a) eps_old / eps_new).
ScalarField rescale_resample(const ScalarField& u_old, double eps_old, double eps_new,
                             const std::vector<Point>& centers, const TensorGrid& target);

struct ContinuationStep {
  double eps = 0.0;
  std::shared_ptr<const ProblemSpec> spec;
  ScalarField u;
  SolveReport report;
  std::string error;  ///< empty on success
};

/// Solve at each eps of a decreasing schedule, the first from the ansatz and the
/// rest warm-started from the previous solution. Stops at the first failure,
/// which is reported as the last step.
std::vector<ContinuationStep> continuation_solve(const ProblemTemplate& tpl, const std::vector<double>& schedule,
                                                 const AnsatzSpec& ansatz, const NewtonConfig& cfg = {});

}  // namespace nlsb
