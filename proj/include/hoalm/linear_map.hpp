#pragma once

#include "hoalm/numeric.hpp"

#include <memory>
#include <vector>

namespace hoalm {

/// A linear map R^cols -> R^rows with its adjoint.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Vector apply(const Vector& x) const = 0;
  virtual Vector adjoint(const Vector& y) const = 0;
  /// Operator 2-norm; power iteration unless a subclass knows better.
  virtual double norm_estimate(double tol = 1e-10) const;
};

class DenseLinearMap final : public LinearMap {
 public:
  explicit DenseLinearMap(Matrix a) : a_(std::move(a)) {}
  Eigen::Index rows() const override { return a_.rows(); }
  Eigen::Index cols() const override { return a_.cols(); }
  Vector apply(const Vector& x) const override;
  Vector adjoint(const Vector& y) const override;
  double norm_estimate(double tol = 1e-10) const override;
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

/// Restriction of a row-major flattened rows x cols matrix to a sorted set
/// of observed flat indices; the adjoint scatters back with zeros elsewhere.
class MaskLinearMap final : public LinearMap {
 public:
  MaskLinearMap(Eigen::Index rows, Eigen::Index cols, std::vector<Eigen::Index> observed);
  Eigen::Index rows() const override { return static_cast<Eigen::Index>(observed_.size()); }
  Eigen::Index cols() const override { return mat_rows_ * mat_cols_; }
  Vector apply(const Vector& x) const override;
  Vector adjoint(const Vector& y) const override;
  Eigen::Index matrix_rows() const { return mat_rows_; }
  Eigen::Index matrix_cols() const { return mat_cols_; }
  const std::vector<Eigen::Index>& observed() const { return observed_; }

 private:
  Eigen::Index mat_rows_;
  Eigen::Index mat_cols_;
  std::vector<Eigen::Index> observed_;
};

/// Power iteration on A^T A through apply/adjoint, started from the
/// normalized all-ones vector.
double spectral_norm_estimate(const LinearMap& a, double tol = 1e-10, int max_iters = 10000);

}  // namespace hoalm
