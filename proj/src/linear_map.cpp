#include "hoalm/linear_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace hoalm {

double LinearMap::norm_estimate(double tol) const { return spectral_norm_estimate(*this, tol); }

Vector DenseLinearMap::apply(const Vector& x) const {
  if (x.size() != a_.cols()) throw std::invalid_argument("DenseLinearMap::apply: size mismatch");
  return a_ * x;
}

Vector DenseLinearMap::adjoint(const Vector& y) const {
  if (y.size() != a_.rows()) throw std::invalid_argument("DenseLinearMap::adjoint: size mismatch");
  return a_.transpose() * y;
}

double DenseLinearMap::norm_estimate(double tol) const {
  return hoalm::spectral_norm_estimate(a_, tol);
}

MaskLinearMap::MaskLinearMap(Eigen::Index rows, Eigen::Index cols,
                             std::vector<Eigen::Index> observed)
    : mat_rows_(rows), mat_cols_(cols), observed_(std::move(observed)) {
  if (!std::is_sorted(observed_.begin(), observed_.end()) ||
      std::adjacent_find(observed_.begin(), observed_.end()) != observed_.end())
    throw std::invalid_argument("MaskLinearMap: observed indices must be strictly increasing");
  if (!observed_.empty() && (observed_.front() < 0 || observed_.back() >= rows * cols))
    throw std::invalid_argument("MaskLinearMap: observed index out of range");
}

Vector MaskLinearMap::apply(const Vector& x) const {
  if (x.size() != cols()) throw std::invalid_argument("MaskLinearMap::apply: shape mismatch");
  Vector out(rows());
  for (std::size_t k = 0; k < observed_.size(); ++k) out(k) = x(observed_[k]);
  return out;
}

Vector MaskLinearMap::adjoint(const Vector& y) const {
  if (y.size() != rows()) throw std::invalid_argument("MaskLinearMap::adjoint: shape mismatch");
  Vector out = Vector::Zero(cols());
  for (std::size_t k = 0; k < observed_.size(); ++k) out(observed_[k]) = y(k);
  return out;
}

double spectral_norm_estimate(const LinearMap& a, double tol, int max_iters) {
  if (a.cols() == 0 || a.rows() == 0) return 0.0;
  auto normal = [&a](const Vector& v) -> Vector { return a.adjoint(a.apply(v)); };
  return detail::power_norm(normal, Vector::Ones(a.cols()), tol, max_iters);
}

}  // namespace hoalm
