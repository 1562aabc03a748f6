#pragma once

#include <utility>
#include <vector>

namespace nlsb {

/// Shooting parameters for the radial ground state. Zero-valued fields
/// select the automatic default described next to each member.
struct ShootingConfig {
  double r_max = 0.0;               ///< 0: 10/sqrt(v_a) + 10
  double ode_step = 1e-3;
  double bracket_lo = 0.0;          ///< 0 (with bracket_hi = 0): automatic bracket search
  double bracket_hi = 0.0;
  double bisect_tol = 1e-14;        ///< relative width of the final u(0) bracket
  double overshoot_threshold = 1e-10;  ///< relative to u(0)
  int max_iterations = 200;
};

struct ProfileSample {
  double value;
  double slope;  ///< dU/dr
};

/// Sampled positive radial solution of  -Δu + v_a u = |u|^{p-2} u  in R^dim,
/// u(0) = max u. Nodes are uniform in r starting at 0.
class RadialProfile {
 public:
  RadialProfile(double v_a, double p, int dim, double step, std::vector<double> values,
                std::vector<double> dvalues, double decay_rate);

  double v_a() const { return v_a_; }
  double p() const { return p_; }
  int dim() const { return dim_; }
  double step() const { return step_; }
  double r_max() const { return step_ * static_cast<double>(values_.size() - 1); }
  double decay_rate() const { return decay_rate_; }
  double center_value() const { return values_.front(); }
  std::size_t size() const { return values_.size(); }
  double r_node(std::size_t i) const { return step_ * static_cast<double>(i); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& dvalues() const { return dvalues_; }

  /// Copy with a different tail decay rate (used for the beyond-r_max extrapolation).
  RadialProfile with_decay_rate(double rate) const;

  /// Value and radial derivative at any r >= 0. Cubic Hermite inside the table,
  /// C exp(-rate r) r^{-(dim-1)/2} beyond it.
  ProfileSample eval(double r) const;
  /// Second radial derivative, from the ODE inside the table.
  double second_derivative(double r) const;

 private:
  double v_a_;
  double p_;
  int dim_;
  double step_;
  std::vector<double> values_;
  std::vector<double> dvalues_;
  double decay_rate_;
  double tail_coeff_;
};

RadialProfile solve_ground_state(double v_a, double p, int dim, const ShootingConfig& cfg = {});

/// Least-squares slope magnitude of log(U r^{(dim-1)/2}) against r on the window.
double decay_rate(const RadialProfile& profile, std::pair<double, double> fit_window);

ProfileSample eval_profile(const RadialProfile& profile, double r);

/// Max over interior nodes of |U'' + (dim-1)/r U' - v_a U + U^{p-1}|, with U''
/// from central differences of the stored derivative.
double ode_residual(const RadialProfile& profile);

/// ∫_{R^dim} |y|^k U(|y|)^q dy, truncated at r_max (Simpson on the table).
double radial_moment(const RadialProfile& profile, double q, double k = 0.0);

/// Surface measure of the unit sphere in R^dim.
double unit_sphere_area(int dim);

/// Largest admissible p (exclusive) for the given dimension; infinity for dim <= 2.
double critical_exponent(int dim);

/// |u|^{p-2} u with fast paths for integer p.
double power_nonlinearity(double u, double p);

}  // namespace nlsb
