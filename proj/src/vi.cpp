#include "hoalm/vi.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hoalm {

Eigen::Index MonotoneOperator::dim() const {
  if (affine) return affine->m.cols();
  if (known_solution) return known_solution->size();
  return -1;
}

MonotoneOperator make_affine_operator(Matrix m, Vector q,
                                      std::optional<Vector> known_solution) {
  if (m.rows() != m.cols() || q.size() != m.rows())
    throw std::invalid_argument("affine operator: M must be square and match q");
  MonotoneOperator op;
  op.affine = AffineParts{std::move(m), std::move(q)};
  op.evaluate = [parts = *op.affine](const Vector& x) -> Vector {
    return parts.m * x + parts.q;
  };
  op.known_solution = std::move(known_solution);
  return op;
}

void PpaConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("PpaConfig: lambda must be positive");
  if (max_iters < 0) throw std::invalid_argument("PpaConfig: max_iters must be >= 0");
  if (!(step_tol >= 0.0)) throw std::invalid_argument("PpaConfig: step_tol must be >= 0");
  if (domain)
    throw std::invalid_argument("PpaConfig: only the unconstrained domain is supported");
}

namespace {

// Solves (lambda M + s I) y = r, taking the symmetric path when M allows it.
class ShiftedSolver {
 public:
  ShiftedSolver(const Matrix& m, double lambda) : scaled_(lambda * m) {
    symmetric_ = scaled_ == scaled_.transpose();
  }

  Vector solve(double s, const Vector& r) const {
    if (symmetric_) return solve_shifted_system(scaled_, s, r);
    Matrix shifted = scaled_;
    shifted.diagonal().array() += s;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    return lu.solve(r);
  }

 private:
  Matrix scaled_;
  bool symmetric_ = false;
};

}  // namespace

PpaStep ppa_step_affine(const MonotoneOperator& op, const Vector& x_k,
                        const PpaConfig& cfg) {
  cfg.validate();
  if (!op.affine) throw std::invalid_argument("ppa_step_affine: operator has no affine parts");
  const AffineParts& parts = *op.affine;
  if (x_k.size() != parts.m.cols())
    throw std::invalid_argument("ppa_step_affine: dimension mismatch");

  const Vector r = cfg.lambda * (parts.m * x_k + parts.q);
  if (r.norm() == 0.0) return {x_k, 0.0, 0};

  const ShiftedSolver solver(parts.m, cfg.lambda);
  if (cfg.p.is_one()) {
    Vector y = solver.solve(1.0, r);
    return {x_k - y, 1.0, 1};
  }

  const double expo = cfg.p.value() - 1.0;
  int evals = 0;
  auto g = [&](double s) {
    ++evals;
    return std::pow(solver.solve(s, r).norm(), expo) - s;
  };

  // Bracket the root with g(lo) >= 0 > g(hi).
  double lo = 1.0, hi = 1.0;
  double g_lo = g(1.0), g_hi = g_lo;
  if (g_lo >= 0.0) {
    int doublings = 0;
    while (g_hi >= 0.0) {
      if (++doublings > 200)
        throw std::runtime_error("ppa_step_affine: subproblem bracketing failure");
      lo = hi;
      g_lo = g_hi;
      hi *= 2.0;
      g_hi = g(hi);
    }
  } else {
    while (g_lo < 0.0) {
      hi = lo;
      g_hi = g_lo;
      lo *= 0.5;
      if (lo < std::numeric_limits<double>::min())
        throw std::runtime_error("ppa_step_affine: subproblem bracketing failure");
      g_lo = g(lo);
    }
  }

  const double eps = std::numeric_limits<double>::epsilon();
  while (hi - lo > 2.0 * eps * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid == 0.0) {
      lo = hi = mid;
      g_lo = g_hi = 0.0;
      break;
    }
    if (g_mid > 0.0) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }
  const double s = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
  Vector y = solver.solve(s, r);
  return {x_k - y, s, evals + 1};
}

PpaTrace run_ppa(const MonotoneOperator& op, const Vector& x0, const PpaConfig& cfg) {
  cfg.validate();
  if (!op.evaluate) throw std::invalid_argument("run_ppa: operator has no evaluate oracle");
  if (!op.affine && !op.exact_step)
    throw std::invalid_argument("run_ppa: operator needs affine parts or an exact step oracle");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  PpaTrace trace;
  trace.iterates.push_back(x0);
  if (op.known_solution) trace.distances_to_solution.push_back((x0 - *op.known_solution).norm());

  Vector x = x0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    Vector next;
    int root_iters = 0;
    if (op.affine) {
      PpaStep step = ppa_step_affine(op, x, cfg);
      next = std::move(step.x);
      root_iters = step.root_iterations;
    } else {
      next = op.exact_step(x, cfg);
    }
    const double step_norm = (next - x).norm();
    trace.step_norms.push_back(step_norm);
    trace.residual_norms.push_back(cfg.lambda * op.evaluate(next).norm());
    trace.root_iterations.push_back(root_iters);
    if (op.known_solution)
      trace.distances_to_solution.push_back((next - *op.known_solution).norm());
    trace.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(Clock::now() - start).count());
    trace.iterates.push_back(next);
    x = std::move(next);
    if (step_norm <= cfg.step_tol) break;
  }
  return trace;
}

double natural_residual(const MonotoneOperator& op, const Vector& x, const PpaConfig& cfg) {
  if (cfg.domain)
    throw std::invalid_argument("natural_residual: only the unconstrained domain is supported");
  return op.evaluate(x).norm();
}

}  // namespace hoalm
