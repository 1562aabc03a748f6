#pragma once

#include <functional>
#include <vector>

namespace nlsb {

/// y = Op(x) on raw arrays of a fixed length.
using LinearOp = std::function<void(const double* x, double* y)>;

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  /// Final relative residual in the preconditioner norm, ‖r‖_M / ‖b‖_M.
  double relative_residual = 0.0;
};

/// Preconditioned MINRES for symmetric, possibly indefinite A with symmetric
/// positive definite preconditioner M ≈ A⁻¹ (identity when precond is empty).
/// x holds the initial guess on entry.
KrylovResult minres(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                    std::vector<double>& x, double rtol, int max_iterations);

/// Preconditioned conjugate gradients for symmetric positive definite A.
KrylovResult conjugate_gradient(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                                std::vector<double>& x, double rtol, int max_iterations);

double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace nlsb
