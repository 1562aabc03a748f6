#include "nlsb/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlsb/error.hpp"

namespace nlsb {

double power_nonlinearity(double u, double p) {
  if (p == 3.0) return std::abs(u) * u;
  if (p == 4.0) return u * u * u;
  if (p == 6.0) {
    const double u2 = u * u;
    return u2 * u2 * u;
  }
  return std::pow(std::abs(u), p - 2.0) * u;
}

double critical_exponent(int dim) {
  if (dim <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 * dim / (dim - 2.0);
}

double unit_sphere_area(int dim) {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

namespace {

struct State {
  double u;
  double v;
};

struct RadialOde {
  double v_a;
  double p;
  int dim;

  State rhs(double r, State s) const {
    return {s.v, v_a * s.u - power_nonlinearity(s.u, p) - (dim - 1) / r * s.v};
  }

  State step(double r, State s, double h) const {
    const State k1 = rhs(r, s);
    const State k2 = rhs(r + 0.5 * h, {s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v});
    const State k3 = rhs(r + 0.5 * h, {s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v});
    const State k4 = rhs(r + h, {s.u + h * k3.u, s.v + h * k3.v});
    return {s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
  }

  // Smooth-origin expansion u(r) = u0 + c r^2.
  State start(double u0, double r) const {
    const double c = (v_a * u0 - power_nonlinearity(u0, p)) / (2.0 * dim);
    return {u0 + c * r * r, 2.0 * c * r};
  }
};

// Decaying solution of the linearized ODE at infinity: r^{-nu} K_nu(kappa r).
double decaying_mode(double kappa, int dim, double r) {
  const double nu = std::abs(0.5 * (dim - 2));
  return std::pow(r, -0.5 * (dim - 2)) * std::cyl_bessel_k(nu, kappa * r);
}

double decaying_log_derivative(double kappa, int dim, double r) {
  if (dim == 1) return -kappa;
  if (dim == 3) return -kappa - 1.0 / r;
  const double nu = 0.5 * (dim - 2);
  return -kappa * std::cyl_bessel_k(std::abs(nu + 1.0), kappa * r) /
         std::cyl_bessel_k(std::abs(nu), kappa * r);
}

enum class Fate { Overshoot, Undershoot };

Fate classify(const RadialOde& ode, double u0, double h, std::size_t n_nodes, double threshold) {
  State s = ode.start(u0, h);
  const double kappa = std::sqrt(ode.v_a);
  for (std::size_t k = 1; k + 1 < n_nodes; ++k) {
    s = ode.step(h * static_cast<double>(k), s, h);
    if (s.u < 0.0) return Fate::Overshoot;
    if (s.v > 0.0 && s.u > threshold * u0) return Fate::Undershoot;
  }
  // Never left the connecting orbit: decide by the growing-mode component.
  const double r_end = h * static_cast<double>(n_nodes - 1);
  const double growing = s.v - decaying_log_derivative(kappa, ode.dim, r_end) * s.u;
  return growing > 0.0 ? Fate::Undershoot : Fate::Overshoot;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::pair<double, double> default_window(double v_a, double r_max) {
  const double kappa = std::sqrt(v_a);
  return {std::min(6.0 / kappa, 0.3 * r_max), std::min(10.0 / kappa, 0.5 * r_max)};
}

}  // namespace

RadialProfile::RadialProfile(double v_a, double p, int dim, double step, std::vector<double> values,
                             std::vector<double> dvalues, double decay_rate)
    : v_a_(v_a),
      p_(p),
      dim_(dim),
      step_(step),
      values_(std::move(values)),
      dvalues_(std::move(dvalues)),
      decay_rate_(decay_rate) {
  if (values_.size() < 2 || values_.size() != dvalues_.size())
    fail(ErrorKind::Shape, "radial profile needs matching value/derivative tables");
  const double rm = r_max();
  tail_coeff_ = values_.back() * std::exp(decay_rate_ * rm) * std::pow(rm, 0.5 * (dim_ - 1));
}

RadialProfile RadialProfile::with_decay_rate(double rate) const {
  return RadialProfile(v_a_, p_, dim_, step_, values_, dvalues_, rate);
}

double RadialProfile::second_derivative(double r) const {
  const double rm = r_max();
  if (r > rm) {
    const double c = 0.5 * (dim_ - 1);
    const double u = eval(r).value;
    const double g = decay_rate_ + c / r;
    return (c / (r * r) + g * g) * u;
  }
  const ProfileSample s = eval(r);
  const double reaction = v_a_ * s.value - power_nonlinearity(s.value, p_);
  if (r == 0.0) return reaction / dim_;
  return reaction - (dim_ - 1) / r * s.slope;
}

ProfileSample RadialProfile::eval(double r) const {
  r = std::abs(r);
  const double rm = r_max();
  if (r >= rm) {
    if (r == rm) return {values_.back(), dvalues_.back()};
    const double u = tail_coeff_ * std::exp(-decay_rate_ * r) * std::pow(r, -0.5 * (dim_ - 1));
    return {u, -(decay_rate_ + 0.5 * (dim_ - 1) / r) * u};
  }
  const double x = r / step_;
  const auto i = std::min(static_cast<std::size_t>(x), values_.size() - 2);
  const double t = x - static_cast<double>(i);
  if (t == 0.0) return {values_[i], dvalues_[i]};
  const double h = step_;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  const double value = h00 * values_[i] + h10 * h * dvalues_[i] + h01 * values_[i + 1] +
                       h11 * h * dvalues_[i + 1];

  // Derivative: Hermite on (U', U'') with U'' taken from the ODE at the nodes.
  auto node_curvature = [&](std::size_t k) {
    const double reaction = v_a_ * values_[k] - power_nonlinearity(values_[k], p_);
    if (k == 0) return reaction / dim_;
    return reaction - (dim_ - 1) / r_node(k) * dvalues_[k];
  };
  const double slope = h00 * dvalues_[i] + h10 * h * node_curvature(i) + h01 * dvalues_[i + 1] +
                       h11 * h * node_curvature(i + 1);
  return {value, slope};
}

RadialProfile solve_ground_state(double v_a, double p, int dim, const ShootingConfig& cfg) {
  if (!(v_a > 0.0)) fail(ErrorKind::Domain, "v_a must be positive");
  if (dim < 1) fail(ErrorKind::Domain, "dim must be >= 1");
  if (!(p > 2.0)) fail(ErrorKind::Domain, "p must exceed 2");
  if (!(p < critical_exponent(dim)))
    fail(ErrorKind::Domain, "p is not subcritical for dim " + std::to_string(dim));
  if (!(cfg.ode_step > 0.0) || !(cfg.bisect_tol > 0.0))
    fail(ErrorKind::Domain, "ode_step and bisect_tol must be positive");

  const RadialOde ode{v_a, p, dim};
  const double kappa = std::sqrt(v_a);
  const double h = cfg.ode_step;
  const double r_max_req = cfg.r_max > 0.0 ? cfg.r_max : 10.0 / kappa + 10.0;
  const auto n_steps = static_cast<std::size_t>(std::ceil(r_max_req / h - 1e-9));
  const std::size_t n_nodes = n_steps + 1;
  if (n_nodes < 16) fail(ErrorKind::Domain, "r_max too small for ode_step");
  const double threshold = cfg.overshoot_threshold;

  // Bracket for u(0).
  double lo = cfg.bracket_lo;
  double hi = cfg.bracket_hi;
  if (lo == 0.0 && hi == 0.0) {
    const double level = std::pow(v_a, 1.0 / (p - 2.0));  // constant solution
    lo = 0.5 * level;
    hi = 2.0 * level;
    int doublings = 0;
    while (classify(ode, hi, h, n_nodes, threshold) == Fate::Undershoot) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 60) fail(ErrorKind::Bracket, "no overshooting u(0) found");
    }
  } else {
    if (!(lo > 0.0 && lo < hi)) fail(ErrorKind::Bracket, "need 0 < bracket_lo < bracket_hi");
    const Fate f_lo = classify(ode, lo, h, n_nodes, threshold);
    const Fate f_hi = classify(ode, hi, h, n_nodes, threshold);
    if (f_lo != Fate::Undershoot || f_hi != Fate::Overshoot)
      fail(ErrorKind::Bracket, "bracket does not straddle u(0)");
  }

  int iter = 0;
  while (hi - lo > cfg.bisect_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // machine resolution
    if (++iter > cfg.max_iterations)
      fail(ErrorKind::Convergence, "bisection exceeded its iteration budget");
    (classify(ode, mid, h, n_nodes, threshold) == Fate::Undershoot ? lo : hi) = mid;
  }

  // Outward part: average of the two bracketing trajectories while they agree.
  std::vector<double> values(n_nodes), dvalues(n_nodes);
  values[0] = 0.5 * (lo + hi);
  dvalues[0] = 0.0;
  State s_lo = ode.start(lo, h);
  State s_hi = ode.start(hi, h);
  std::size_t trusted = 0;
  for (std::size_t k = 1; k < n_nodes; ++k) {
    const double u = 0.5 * (s_lo.u + s_hi.u);
    const double v = 0.5 * (s_lo.v + s_hi.v);
    if (!(u > 0.0) || !(v < 0.0) || std::abs(s_hi.u - s_lo.u) > 1e-8 * u) break;
    values[k] = u;
    dvalues[k] = v;
    trusted = k;
    if (k + 1 < n_nodes) {
      const double r = h * static_cast<double>(k);
      s_lo = ode.step(r, s_lo, h);
      s_hi = ode.step(r, s_hi, h);
    }
  }
  if (trusted < 8) fail(ErrorKind::Convergence, "shooting trajectory diverged near the origin");

  // Tail: integrate inward from r_max (stable direction for the decaying mode),
  // scaled to match the outward value at the last trusted node.
  if (trusted + 1 < n_nodes) {
    const double r_end = h * static_cast<double>(n_nodes - 1);
    const double r_join = h * static_cast<double>(trusted);
    double amp = values[trusted] / decaying_mode(kappa, dim, r_join) *
                 decaying_mode(kappa, dim, r_end);
    const double ell = decaying_log_derivative(kappa, dim, r_end);
    std::vector<State> inward(n_nodes);
    for (int pass = 0; pass < 8; ++pass) {
      State s{amp, amp * ell};
      inward[n_nodes - 1] = s;
      for (std::size_t k = n_nodes - 1; k > trusted; --k) {
        s = ode.step(h * static_cast<double>(k), s, -h);
        inward[k - 1] = s;
      }
      const double ratio = values[trusted] / inward[trusted].u;
      amp *= ratio;
      if (std::abs(ratio - 1.0) < 1e-14) break;
    }
    const double scale = values[trusted] / inward[trusted].u;
    for (std::size_t k = trusted + 1; k < n_nodes; ++k) {
      values[k] = inward[k].u * scale;
      dvalues[k] = inward[k].v * scale;
    }
  }

  for (std::size_t k = 1; k < n_nodes; ++k) {
    if (!(values[k] > 0.0) || !(values[k] < values[k - 1]))
      fail(ErrorKind::Convergence, "shooting produced a non-monotone profile");
  }

  RadialProfile provisional(v_a, p, dim, h, std::move(values), std::move(dvalues), kappa);
  const double rate = decay_rate(provisional, default_window(v_a, provisional.r_max()));
  return provisional.with_decay_rate(rate);
}

double decay_rate(const RadialProfile& profile, std::pair<double, double> fit_window) {
  const auto [a, b] = fit_window;
  if (!(a > 0.0 && a < b && b < profile.r_max()))
    fail(ErrorKind::Domain, "fit window must lie inside (0, r_max)");
  std::vector<double> xs, ys;
  const double c = 0.5 * (profile.dim() - 1);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double r = profile.r_node(i);
    if (r < a || r > b) continue;
    const double u = profile.values()[i];
    if (!(u > 0.0)) fail(ErrorKind::Domain, "non-positive sample inside the fit window");
    xs.push_back(r);
    ys.push_back(std::log(u) + c * std::log(r));
  }
  if (xs.size() < 2) fail(ErrorKind::Domain, "fit window contains fewer than two nodes");
  return -fit_slope(xs, ys);
}

ProfileSample eval_profile(const RadialProfile& profile, double r) { return profile.eval(r); }

double ode_residual(const RadialProfile& profile) {
  const auto& u = profile.values();
  const auto& du = profile.dvalues();
  const double h = profile.step();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double r = profile.r_node(i);
    const double d2 = (du[i + 1] - du[i - 1]) / (2.0 * h);
    const double res = d2 + (profile.dim() - 1) / r * du[i] - profile.v_a() * u[i] +
                       power_nonlinearity(u[i], profile.p());
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double radial_moment(const RadialProfile& profile, double q, double k) {
  const auto& u = profile.values();
  const double h = profile.step();
  const int n_dim = profile.dim();
  auto f = [&](std::size_t i) {
    const double r = profile.r_node(i);
    const double rw = std::pow(r, n_dim - 1 + k);
    return rw * std::pow(u[i], q);
  };
  std::size_t last = u.size() - 1;
  double sum = 0.0;
  std::size_t simpson_end = (last % 2 == 0) ? last : last - 1;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
    sum += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
  if (simpson_end != last) sum += 0.5 * h * (f(last - 1) + f(last));
  return unit_sphere_area(n_dim) * sum;
}

}  // namespace nlsb
