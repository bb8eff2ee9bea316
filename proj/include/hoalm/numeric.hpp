#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hoalm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown by the dense kernels on malformed input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves (M + shift * I) y = rhs for symmetric positive semidefinite M.
///
/// Uses a Cholesky factorization of the shifted matrix, falling back to a
/// pivoted LDL^T and then a complete orthogonal decomposition when the
/// factorization reports failure. A zero shift with singular M is rejected
/// with a NumericError whose message contains "singular shift".
Vector solve_shifted_system(const Matrix& m, double shift, const Vector& rhs);

struct ThinSvd {
  Matrix u;       // rows x k, orthonormal columns
  Vector sigma;   // k = min(rows, cols), nonincreasing, nonnegative
  Matrix v;       // cols x k, orthonormal columns
};

/// Thin singular value decomposition x = u * diag(sigma) * v^T.
ThinSvd svd_thin(const Matrix& x);

/// Largest singular value of `a` by power iteration on a^T a.
///
/// The iteration starts from the normalized all-ones vector and stops when
/// two successive estimates agree to relative tolerance `tol`. Returns 0 for
/// the zero matrix.
double spectral_norm_estimate(const Matrix& a, double tol = 1e-10,
                              int max_iters = 10000);

bool all_finite(const Matrix& x);

namespace detail {

// Power iteration on a symmetric PSD operator given as a callable
// v -> N v, where N = A^T A. Returns sqrt of the converged Rayleigh quotient.
// `start` must be nonzero.
template <class NormalApply>
double power_norm(NormalApply&& apply_normal, Vector start, double tol,
                  int max_iters) {
  if (start.size() == 0) return 0.0;
  if (!(tol > 0.0)) throw NumericError("spectral norm tolerance must be > 0");
  Vector v = start / start.norm();
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = apply_normal(v);
    const double rayleigh = std::max(0.0, v.dot(w));
    const double next = std::sqrt(rayleigh);
    const double wn = w.norm();
    if (wn == 0.0) return estimate > 0.0 ? estimate : 0.0;
    v = w / wn;
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace detail

}  // namespace hoalm
