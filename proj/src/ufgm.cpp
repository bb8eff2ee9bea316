#include "hoalm/ufgm.hpp"

#include <cmath>
#include <stdexcept>

namespace hoalm {

void PenaltyOracle::validate() const {
  if (!a) throw std::invalid_argument("PenaltyOracle: missing linear map");
  if (b.size() != a->rows() || multiplier.size() != a->rows())
    throw std::invalid_argument("PenaltyOracle: b and multiplier must live in the range of A");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("PenaltyOracle: beta must be positive");
}

double PenaltyOracle::value_at_residual(const Vector& residual) const {
  const double q = 1.0 + p.inv();
  return multiplier.dot(residual) +
         std::pow(beta, p.inv()) / q * std::pow(residual.norm(), q);
}

double PenaltyOracle::value(const Vector& x) const {
  return value_at_residual(a->apply(x) - b);
}

double PenaltyOracle::holder_constant(double a_norm) const {
  const double pv = p.value();
  return std::pow((pv + 1.0) * std::pow(2.0, pv - 2.0), p.inv()) * std::pow(beta, p.inv()) *
         std::pow(a_norm, 1.0 + p.inv());
}

namespace {

// (1 + d)^a - 1 - a d without cancellation for small d.
double power_excess(double d, double a) {
  if (std::abs(d) > 0.25) return std::pow(1.0 + d, a) - 1.0 - a * d;
  double term = a * (a - 1.0) / 2.0 * d * d;
  double sum = term;
  for (int k = 3; k < 80 && term != 0.0; ++k) {
    term *= (a - (k - 1)) / k * d;
    sum += term;
  }
  return sum;
}

}  // namespace

double PenaltyOracle::bregman_remainder(const Vector& residual_x, const Vector& residual_y) const {
  const double q = 1.0 + p.inv();
  const double c = std::pow(beta, p.inv()) / q;
  const Vector delta = residual_y - residual_x;
  const double ux2 = residual_x.squaredNorm();
  const double d2 = delta.squaredNorm();
  if (ux2 == 0.0) return c * std::pow(d2, q / 2.0);
  const double half_q = q / 2.0;
  const double rel = (2.0 * residual_x.dot(delta) + d2) / ux2;
  return c * std::pow(ux2, half_q) * (power_excess(rel, half_q) + half_q * d2 / ux2);
}

Vector grad_psi(const PenaltyOracle& oracle, const Vector& x) {
  const Vector residual = oracle.a->apply(x) - oracle.b;
  return oracle.a->adjoint(oracle.multiplier +
                           std::pow(oracle.beta, oracle.p.inv()) * i_p(residual, oracle.p));
}

Vector gradient_map(const PenaltyOracle& oracle, const ProxFunction& f, const Vector& z) {
  return z - f.prox(z - grad_psi(oracle, z), 1.0);
}

double composite_objective(const PenaltyOracle& oracle, const ProxFunction& f, const Vector& x) {
  return oracle.value(x) + f.value(x);
}

SubsolverReport minimize_composite(const PenaltyOracle& oracle, const ProxFunction& f,
                                   const Vector& z0, const UfgmOptions& options) {
  oracle.validate();
  if (!(options.eps_sub > 0.0)) throw std::invalid_argument("minimize_composite: eps_sub must be > 0");
  if (z0.size() != oracle.a->cols()) throw std::invalid_argument("minimize_composite: bad start size");

  const double slack = options.eps_sub * options.eps_sub / 16.0;  // eps_acc / 2
  const double root_beta = std::pow(oracle.beta, oracle.p.inv());

  SubsolverReport report;
  Vector y = z0;
  double g_norm = gradient_map(oracle, f, y).norm();
  double lipschitz = options.initial_lipschitz;
  if (g_norm <= options.eps_sub) {
    report.solution = y;
    report.final_grad_map_norm = g_norm;
    report.final_lipschitz = lipschitz;
    report.converged = true;
    return report;
  }

  Vector v = z0;                          // minimizer of the estimate sequence
  Vector weighted_grads = Vector::Zero(z0.size());
  double weight_sum = 0.0;                // A_k

  for (int k = 0; k < options.max_iters; ++k) {
    double trial_l = lipschitz;
    int backtracks = 0;
    double a = 0.0, tau = 0.0;
    Vector gx, y_next;
    for (;;) {
      a = (1.0 + std::sqrt(1.0 + 4.0 * trial_l * weight_sum)) / (2.0 * trial_l);
      tau = a / (weight_sum + a);
      const Vector x = tau * v + (1.0 - tau) * y;
      const Vector rx = oracle.a->apply(x) - oracle.b;
      gx = oracle.a->adjoint(oracle.multiplier + root_beta * i_p(rx, oracle.p));
      const Vector x_hat = f.prox(v - a * gx, a);
      y_next = tau * x_hat + (1.0 - tau) * y;
      const Vector ry = oracle.a->apply(y_next) - oracle.b;
      const double step2 = (y_next - x).squaredNorm();
      if (oracle.bregman_remainder(rx, ry) <= 0.5 * trial_l * step2 + slack * tau) break;
      if (++backtracks > options.max_backtracks)
        throw std::runtime_error("minimize_composite: Lipschitz estimate diverged");
      trial_l *= 2.0;
    }
    weight_sum += a;
    weighted_grads += a * gx;
    v = f.prox(z0 - weighted_grads, weight_sum);
    y = std::move(y_next);
    lipschitz = trial_l / 2.0;
    report.iterations = k + 1;

    g_norm = gradient_map(oracle, f, y).norm();
    if (g_norm <= options.eps_sub) {
      report.converged = true;
      break;
    }
  }
  report.solution = std::move(y);
  report.final_grad_map_norm = g_norm;
  report.final_lipschitz = lipschitz;
  return report;
}

SubsolverReport minimize_composite(const PenaltyOracle& oracle, const ProxFunction& f,
                                   const Vector& z0, double eps_sub, int max_iters) {
  UfgmOptions options;
  options.eps_sub = eps_sub;
  options.max_iters = max_iters;
  return minimize_composite(oracle, f, z0, options);
}

double ufgm_iteration_bound(double holder_constant, double eps, double r, Order p) {
  const double pv = p.value();
  const double scale = std::pow(2.0, (3.0 * pv + 5.0) / (2.0 * pv)) * holder_constant / eps;
  return std::pow(scale, 2.0 * pv / (pv + 3.0)) * std::pow(r, (pv + 1.0) / (pv + 3.0));
}

}  // namespace hoalm
