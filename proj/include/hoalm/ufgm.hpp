#pragma once

#include "hoalm/linear_map.hpp"
#include "hoalm/prox.hpp"

#include <memory>

namespace hoalm {

/// The smooth part of the order-p augmented Lagrangian x-subproblem,
///   psi(x) = mu^T (Ax - b) + beta^(1/p) / (1 + 1/p) |Ax - b|^(1 + 1/p),
/// where mu is the current multiplier.
struct PenaltyOracle {
  std::shared_ptr<const LinearMap> a;
  Vector b;
  Vector multiplier;
  double beta = 1.0;
  Order p{1.0};

  void validate() const;
  double value(const Vector& x) const;
  /// value(x) split at the residual, so callers can reuse A x - b.
  double value_at_residual(const Vector& residual) const;
  /// Hoelder constant of grad psi for exponent 1/p given |A|.
  double holder_constant(double a_norm) const;
  /// psi(y) - psi(x) - <grad psi(x), y - x>, evaluated in residual space in a
  /// form that stays accurate when y is close to x.
  double bregman_remainder(const Vector& residual_x, const Vector& residual_y) const;
};

/// grad psi(x) = A^T mu + beta^(1/p) A^T i_p(Ax - b).
Vector grad_psi(const PenaltyOracle& oracle, const Vector& x);

/// G(z) = z - prox_f(z - grad psi(z)) with unit prox scale.
Vector gradient_map(const PenaltyOracle& oracle, const ProxFunction& f, const Vector& z);

double composite_objective(const PenaltyOracle& oracle, const ProxFunction& f, const Vector& x);

struct UfgmOptions {
  double eps_sub = 1e-1;
  int max_iters = 10000;
  double initial_lipschitz = 1.0;
  int max_backtracks = 200;  // per iteration; exceeding it is a numerical breakdown
};

struct SubsolverReport {
  Vector solution;
  int iterations = 0;
  double final_grad_map_norm = 0.0;
  double final_lipschitz = 0.0;
  bool converged = false;
};

/// Universal fast gradient method for min psi(x) + f(x), stopped once
/// |G(z)| <= eps_sub. The local Lipschitz estimate doubles on every rejected
/// step and halves once per accepted one; the acceptance test carries an
/// additive slack eps_sub^2 / 16.
SubsolverReport minimize_composite(const PenaltyOracle& oracle, const ProxFunction& f,
                                   const Vector& z0, const UfgmOptions& options);

SubsolverReport minimize_composite(const PenaltyOracle& oracle, const ProxFunction& f,
                                   const Vector& z0, double eps_sub, int max_iters);

/// Worst-case iteration count of the universal method to reach objective gap
/// eps from distance r. Only a diagnostic: r is rarely known in advance.
double ufgm_iteration_bound(double holder_constant, double eps, double r, Order p);

}  // namespace hoalm
