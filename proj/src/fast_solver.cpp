#include "nlsb/fast_solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "nlsb/error.hpp"

namespace nlsb {

namespace {
// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FastHelmholtz::Impl {
  fftw_plan plan = nullptr;
  double* buffer = nullptr;
  std::vector<double> inverse_symbol;
  mutable std::mutex exec_mutex;
};

FastHelmholtz::FastHelmholtz(const TensorGrid& grid, double coef, double shift)
    : impl_(std::make_unique<Impl>()), size_(grid.size()) {
  const int dim = grid.dim();
  int n[3];
  fftw_r2r_kind kinds[3];
  for (int a = 0; a < dim; ++a) {
    n[a] = grid.counts()[a];
    kinds[a] = FFTW_RODFT00;
  }
  impl_->buffer = fftw_alloc_real(size_);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->plan = fftw_plan_r2r(dim, n, impl_->buffer, impl_->buffer, kinds, FFTW_ESTIMATE);
  }
  if (!impl_->plan) fail(ErrorKind::LinearSolver, "could not create sine-transform plan");

  std::vector<double> lambda[3];
  double normalization = 1.0;
  for (int a = 0; a < dim; ++a) {
    const double h = grid.spacing()[a];
    lambda[a].resize(n[a]);
    for (int k = 0; k < n[a]; ++k) {
      const double s = std::sin(std::numbers::pi * (k + 1) / (2.0 * (n[a] + 1)));
      lambda[a][k] = 4.0 * s * s / (h * h);
    }
    normalization *= 2.0 * (n[a] + 1);
  }
  impl_->inverse_symbol.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto m = grid.multi_index(i);
    double sym = 0.0;
    for (int a = 0; a < dim; ++a) sym += lambda[a][m[a]];
    const double denom = (coef * sym + shift) * normalization;
    if (!(denom > 0.0)) fail(ErrorKind::LinearSolver, "fast solver operator is not positive definite");
    impl_->inverse_symbol[i] = 1.0 / denom;
  }
}

FastHelmholtz::~FastHelmholtz() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->plan) fftw_destroy_plan(impl_->plan);
  if (impl_->buffer) fftw_free(impl_->buffer);
}

void FastHelmholtz::solve(const double* b, double* x) const {
  std::lock_guard<std::mutex> lock(impl_->exec_mutex);
  double* buf = impl_->buffer;
  for (std::size_t i = 0; i < size_; ++i) buf[i] = b[i];
  fftw_execute(impl_->plan);
  for (std::size_t i = 0; i < size_; ++i) buf[i] *= impl_->inverse_symbol[i];
  fftw_execute(impl_->plan);
  for (std::size_t i = 0; i < size_; ++i) x[i] = buf[i];
}

}  // namespace nlsb
