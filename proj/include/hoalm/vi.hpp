#pragma once

#include "hoalm/numeric.hpp"
#include "hoalm/prox.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hoalm {

struct PpaConfig;

/// F(x) = M x + q.
struct AffineParts {
  Matrix m;
  Vector q;
};

/// A monotone map F for the variational inequality
/// find x* with (x - x*)^T F(x*) >= 0 for all x.
struct MonotoneOperator {
  std::function<Vector(const Vector&)> evaluate;
  std::optional<AffineParts> affine;
  std::optional<Vector> known_solution;
  /// Exact solver of one proximal step for operators without affine parts.
  std::function<Vector(const Vector& x_k, const PpaConfig&)> exact_step;

  Eigen::Index dim() const;
};

MonotoneOperator make_affine_operator(Matrix m, Vector q,
                                      std::optional<Vector> known_solution = {});

/// Closed convex feasible set. Only the whole space is supported by the
/// solvers; setting a domain on PpaConfig is rejected.
struct Domain {
  std::function<Vector(const Vector&)> project;
};

struct PpaConfig {
  Order p{1.0};
  double lambda = 1.0;  // proximal parameter
  int max_iters = 100;
  double step_tol = 0.0;  // stop once |x^{k+1} - x^k| <= step_tol
  std::optional<Domain> domain;

  void validate() const;
};

struct PpaStep {
  Vector x;
  double shift = 0.0;       // s = |x - x_k|^(p-1) at the returned point
  int root_iterations = 0;  // bracketing + bisection evaluations
};

/// One step of the order-p proximal point method for an affine operator on
/// the whole space: solves
///   lambda F(x) + |x - x_k|^(p-1) (x - x_k) = 0.
///
/// Writing s = |x - x_k|^(p-1), x(s) = x_k - (lambda M + s I)^{-1} lambda F(x_k),
/// and s is the unique root of g(s) = |x(s) - x_k|^(p-1) - s, found by
/// geometric bracketing around s = 1 and bisection to machine precision.
PpaStep ppa_step_affine(const MonotoneOperator& op, const Vector& x_k,
                        const PpaConfig& cfg);

struct PpaTrace {
  std::vector<Vector> iterates;          // x^0 .. x^K
  std::vector<double> step_norms;        // |x^{k+1} - x^k|, K entries
  std::vector<double> residual_norms;    // lambda |F(x^{k+1})|, K entries
  std::vector<double> distances_to_solution;  // |x^k - x*|, K+1 entries when known
  std::vector<int> root_iterations;      // K entries
  std::vector<double> wall_ms;           // cumulative, K entries

  std::size_t steps() const { return step_norms.size(); }
};

PpaTrace run_ppa(const MonotoneOperator& op, const Vector& x0, const PpaConfig& cfg);

/// |F(x)|: on the whole space the worst case of (x' - x)^T F(x) over the unit
/// ball around x is -|F(x)|.
double natural_residual(const MonotoneOperator& op, const Vector& x,
                        const PpaConfig& cfg);

}  // namespace hoalm
