#include "hoalm/numeric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace hoalm {

bool all_finite(const Matrix& x) { return x.allFinite(); }

Vector solve_shifted_system(const Matrix& m, double shift, const Vector& rhs) {
  if (m.rows() != m.cols())
    throw NumericError("solve_shifted_system: matrix must be square");
  if (rhs.size() != m.cols())
    throw NumericError("solve_shifted_system: rhs length does not match matrix");
  if (!(shift >= 0.0) || !std::isfinite(shift))
    throw NumericError("solve_shifted_system: shift must be finite and >= 0");

  Matrix shifted = m;
  shifted.diagonal().array() += shift;

  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() == Eigen::Success) {
    Vector y = llt.solve(rhs);
    y += llt.solve(rhs - shifted * y);  // one step of iterative refinement
    if (y.allFinite()) return y;
  }

  Eigen::LDLT<Matrix> ldlt(shifted);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    // LDLT happily "solves" singular systems; only accept a tiny residual.
    Vector y = ldlt.solve(rhs);
    const double res = (shifted * y - rhs).norm();
    if (y.allFinite() && res <= 1e-12 * std::max(1.0, rhs.norm())) return y;
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(shifted);
  if (cod.rank() < shifted.rows())
    throw NumericError("solve_shifted_system: singular shift (M + sI is singular)");
  return cod.solve(rhs);
}

ThinSvd svd_thin(const Matrix& x) {
  if (!x.allFinite()) throw NumericError("svd_thin: non-finite input");
  const Eigen::Index k = std::min(x.rows(), x.cols());
  if (k == 0) return {Matrix(x.rows(), 0), Vector(0), Matrix(x.cols(), 0)};
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double spectral_norm_estimate(const Matrix& a, double tol, int max_iters) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) throw NumericError("spectral_norm_estimate: non-finite input");
  Eigen::Index max_col = 0;
  const double max_col_norm = a.colwise().norm().maxCoeff(&max_col);
  if (max_col_norm == 0.0) return 0.0;

  auto normal = [&a](const Vector& v) -> Vector { return a.transpose() * (a * v); };
  const double est = detail::power_norm(normal, Vector::Ones(a.cols()), tol, max_iters);
  if (est > 0.0) return est;
  // The all-ones start lies in the null space of A; restart deterministically
  // from the basis vector of the heaviest column.
  return detail::power_norm(normal, Vector::Unit(a.cols(), max_col), tol, max_iters);
}

}  // namespace hoalm
