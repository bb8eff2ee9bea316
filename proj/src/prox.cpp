#include "hoalm/prox.hpp"

#include <cmath>

namespace hoalm {

Order::Order(double p) : p_(p) {
  if (!std::isfinite(p) || p < 1.0)
    throw std::invalid_argument("order p must be finite and >= 1");
}

Vector i_p(const Vector& x, Order p) {
  const double n = x.norm();
  if (n == 0.0) return Vector::Zero(x.size());
  if (p.is_one()) return x;
  return x / std::pow(n, 1.0 - p.inv());
}

Vector soft_threshold(const Vector& v, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold: t must be >= 0");
  return v.unaryExpr([t](double a) {
    const double mag = std::abs(a) - t;
    return mag > 0.0 ? std::copysign(mag, a) : 0.0;
  });
}

Matrix singular_value_threshold(const Matrix& x, double t) {
  if (!(t >= 0.0))
    throw std::invalid_argument("singular_value_threshold: t must be >= 0");
  if (!x.allFinite())
    throw NumericError("singular_value_threshold: non-finite input");
  if (t == 0.0) return x;
  const ThinSvd svd = svd_thin(x);
  Eigen::Index rank = 0;
  while (rank < svd.sigma.size() && svd.sigma(rank) > t) ++rank;
  if (rank == 0) return Matrix::Zero(x.rows(), x.cols());
  const Vector shrunk = svd.sigma.head(rank).array() - t;
  return svd.u.leftCols(rank) * shrunk.asDiagonal() * svd.v.leftCols(rank).transpose();
}

Vector flatten_row_major(const Matrix& x) {
  Vector out(x.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(k++) = x(i, j);
  return out;
}

Matrix unflatten_row_major(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw std::invalid_argument("unflatten_row_major: size mismatch");
  Matrix out(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = v(k++);
  return out;
}

ProxFunction l1_norm() {
  return {"l1",
          [](const Vector& x) { return x.lpNorm<1>(); },
          [](const Vector& x, double t) { return soft_threshold(x, t); }};
}

ProxFunction nuclear_norm(Eigen::Index rows, Eigen::Index cols) {
  return {"nuclear",
          [rows, cols](const Vector& x) {
            return svd_thin(unflatten_row_major(x, rows, cols)).sigma.sum();
          },
          [rows, cols](const Vector& x, double t) {
            return flatten_row_major(
                singular_value_threshold(unflatten_row_major(x, rows, cols), t));
          }};
}

ProxFunction zero_function() {
  return {"zero",
          [](const Vector&) { return 0.0; },
          [](const Vector& x, double) { return x; }};
}

}  // namespace hoalm
