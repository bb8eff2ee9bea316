#pragma once

#include "hoalm/linear_map.hpp"
#include "hoalm/problems.hpp"
#include "hoalm/prox.hpp"
#include "hoalm/ufgm.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hoalm {

/// min f(x) subject to A x = b over the whole space.
struct CompositeProblem {
  ProxFunction f;
  std::shared_ptr<const LinearMap> a;
  Vector b;
  std::optional<double> optimal_value;

  void validate() const;
};

CompositeProblem make_bp_problem(const BpInstance& inst);
CompositeProblem make_mc_problem(const McInstance& inst);

struct AlmConfig {
  Order p{1.0};
  double beta = 1.0;
  double eps = 1e-4;      // stop once |A x^k - b| <= eps
  double eps_sub = 1e-1;  // subsolver gradient-map tolerance
  int max_outer = 500;
  int max_inner = 10000;
  /// Start each x-update at the previous iterate instead of at x^0. Off by
  /// default: with a loose eps_sub a warm start can leave the subproblem
  /// "solved" after zero steps and the residual stalls.
  bool warm_start = false;

  void validate() const;
};

struct XUpdate {
  Vector x;
  SubsolverReport report;
};

/// x^{k+1} = argmin f(x) + mu^T (Ax - b) + beta^(1/p)/(1+1/p) |Ax - b|^(1+1/p),
/// solved inexactly by the universal fast gradient method started at `start`.
XUpdate alm_x_update(const CompositeProblem& prob, const Vector& multiplier,
                     const Vector& start, const AlmConfig& cfg);

/// mu^{k+1} = mu^k + beta^(1/p) i_p(residual).
Vector multiplier_update(const Vector& multiplier, const Vector& residual, const AlmConfig& cfg);

/// | -residual + (1/beta) |mu_old - mu_new|^(p-1) (mu_new - mu_old) |, which
/// the multiplier update makes vanish identically.
double multiplier_identity_residual(const Vector& mu_old, const Vector& mu_new,
                                    const Vector& residual, const AlmConfig& cfg);

struct AlmRecord {
  int iter = 0;
  double r = 0.0;                // |A x^k - b|
  double dual_step_norm = 0.0;   // |mu^k - mu^{k-1}|
  int inner_iters = 0;
  long long cum_inner = 0;
  double objective = 0.0;        // f(x^k)
  double wall_ms = 0.0;          // cumulative
  double grad_map_norm = 0.0;    // measured dual infeasibility of the x-update
  double identity_residual = 0.0;
  bool inner_converged = true;
};

enum class AlmStatus { converged, max_outer };

std::string to_string(AlmStatus status);

/// Record 0 is the starting point; record k >= 1 follows the k-th outer step.
struct AlmTrace {
  std::vector<AlmRecord> records;
  AlmStatus status = AlmStatus::max_outer;
  int unconverged_inner = 0;
  Vector x;
  Vector multiplier;

  /// First iteration whose residual is <= tol, if any.
  std::optional<int> iterations_to(double tol) const;
};

AlmTrace run_alm(const CompositeProblem& prob, const Vector& x0, const Vector& mu0,
                 const AlmConfig& cfg);

/// Exact minimizer of the order-p proximal step on the dual of basis pursuit,
///   argmin_u b^T u + 1/(beta (p+1)) |u - mu|^(p+1)  s.t.  |A^T u|_inf <= 1,
/// by enumerating the unconstrained minimizer, the minimizer on every
/// constraint line and every vertex. Only for an l1 objective, a dense A and
/// m <= 2.
Vector dual_prox_oracle(const CompositeProblem& prob, const Vector& multiplier,
                        const AlmConfig& cfg);

}  // namespace hoalm
