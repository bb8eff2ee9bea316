#pragma once

#include "hoalm/numeric.hpp"

#include <functional>
#include <string>

namespace hoalm {

/// Order of the proximal regularization, p >= 1.
class Order {
 public:
  explicit Order(double p);
  double value() const { return p_; }
  double inv() const { return 1.0 / p_; }
  bool is_one() const { return p_ == 1.0; }

 private:
  double p_;
};

/// A closed proper convex function with a cheap scaled proximal map.
///
/// prox(point, t) returns argmin_z { t f(z) + 1/2 |z - point|^2 }.
struct ProxFunction {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&, double)> prox;
};

/// x / |x|^(1 - 1/p), and 0 at x = 0. Gradient of |x|^(1+1/p) / (1 + 1/p).
Vector i_p(const Vector& x, Order p);

/// sign(v) * max(|v| - t, 0), the prox of t |.|_1.
Vector soft_threshold(const Vector& v, double t);

/// Shrinks the singular values of x by t, the prox of t |.|_*.
Matrix singular_value_threshold(const Matrix& x, double t);

ProxFunction l1_norm();

/// Nuclear norm of a rows x cols matrix stored row-major in a flat vector.
ProxFunction nuclear_norm(Eigen::Index rows, Eigen::Index cols);

ProxFunction zero_function();

// Row-major flattening used by every vector-typed solver interface.
Vector flatten_row_major(const Matrix& x);
Matrix unflatten_row_major(const Vector& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace hoalm
