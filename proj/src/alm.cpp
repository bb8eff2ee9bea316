#include "hoalm/alm.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hoalm {

void CompositeProblem::validate() const {
  if (!a) throw std::invalid_argument("CompositeProblem: missing linear map");
  if (!f.value || !f.prox) throw std::invalid_argument("CompositeProblem: f needs value and prox");
  if (b.size() != a->rows()) throw std::invalid_argument("CompositeProblem: b does not match A");
}

CompositeProblem make_bp_problem(const BpInstance& inst) {
  return {l1_norm(), std::make_shared<DenseLinearMap>(inst.a), inst.b, std::nullopt};
}

CompositeProblem make_mc_problem(const McInstance& inst) {
  return {nuclear_norm(inst.m, inst.n), inst.mask(), inst.b, std::nullopt};
}

void AlmConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("AlmConfig: beta must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("AlmConfig: eps must be > 0");
  if (!(eps_sub > 0.0)) throw std::invalid_argument("AlmConfig: eps_sub must be > 0");
  if (max_outer <= 0) throw std::invalid_argument("AlmConfig: max_outer must be > 0");
  if (max_inner <= 0) throw std::invalid_argument("AlmConfig: max_inner must be > 0");
}

std::string to_string(AlmStatus status) {
  switch (status) {
    case AlmStatus::converged: return "converged";
    case AlmStatus::max_outer: return "max_outer";
  }
  return "unknown";
}

std::optional<int> AlmTrace::iterations_to(double tol) const {
  for (const auto& rec : records)
    if (rec.r <= tol) return rec.iter;
  return std::nullopt;
}

XUpdate alm_x_update(const CompositeProblem& prob, const Vector& multiplier,
                     const Vector& start, const AlmConfig& cfg) {
  PenaltyOracle oracle{prob.a, prob.b, multiplier, cfg.beta, cfg.p};
  SubsolverReport report = minimize_composite(oracle, prob.f, start, cfg.eps_sub, cfg.max_inner);
  Vector x = report.solution;
  return {std::move(x), std::move(report)};
}

Vector multiplier_update(const Vector& multiplier, const Vector& residual, const AlmConfig& cfg) {
  return multiplier + std::pow(cfg.beta, cfg.p.inv()) * i_p(residual, cfg.p);
}

double multiplier_identity_residual(const Vector& mu_old, const Vector& mu_new,
                                    const Vector& residual, const AlmConfig& cfg) {
  const Vector step = mu_new - mu_old;
  const double scale = cfg.p.is_one() ? 1.0 : std::pow(step.norm(), cfg.p.value() - 1.0);
  return (-residual + scale / cfg.beta * step).norm();
}

AlmTrace run_alm(const CompositeProblem& prob, const Vector& x0, const Vector& mu0,
                 const AlmConfig& cfg) {
  prob.validate();
  cfg.validate();
  if (x0.size() != prob.a->cols() || mu0.size() != prob.a->rows())
    throw std::invalid_argument("run_alm: starting point has wrong dimensions");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  AlmTrace trace;
  Vector x = x0;
  Vector mu = mu0;
  Vector residual = prob.a->apply(x) - prob.b;

  AlmRecord first;
  first.r = residual.norm();
  first.objective = prob.f.value(x);
  first.wall_ms = elapsed_ms();
  trace.records.push_back(first);

  long long cum_inner = 0;
  for (int k = 1; k <= cfg.max_outer && trace.records.back().r > cfg.eps; ++k) {
    XUpdate update = alm_x_update(prob, mu, cfg.warm_start ? x : x0, cfg);
    x = std::move(update.x);
    residual = prob.a->apply(x) - prob.b;
    Vector mu_next = multiplier_update(mu, residual, cfg);

    AlmRecord rec;
    rec.iter = k;
    rec.r = residual.norm();
    rec.dual_step_norm = (mu_next - mu).norm();
    rec.inner_iters = update.report.iterations;
    cum_inner += update.report.iterations;
    rec.cum_inner = cum_inner;
    rec.objective = prob.f.value(x);
    rec.grad_map_norm = update.report.final_grad_map_norm;
    rec.identity_residual = multiplier_identity_residual(mu, mu_next, residual, cfg);
    rec.inner_converged = update.report.converged;
    if (!rec.inner_converged) ++trace.unconverged_inner;
    mu = std::move(mu_next);
    rec.wall_ms = elapsed_ms();
    trace.records.push_back(rec);
  }

  trace.status = trace.records.back().r <= cfg.eps ? AlmStatus::converged : AlmStatus::max_outer;
  trace.x = std::move(x);
  trace.multiplier = std::move(mu);
  return trace;
}

namespace {

struct DualObjective {
  const Matrix& a;
  const Vector& b;
  const Vector& center;
  double beta;
  double p;

  bool feasible(const Vector& u) const {
    return (a.transpose() * u).lpNorm<Eigen::Infinity>() <= 1.0 + 1e-10;
  }
  double operator()(const Vector& u) const {
    return b.dot(u) + std::pow((u - center).norm(), p + 1.0) / (beta * (p + 1.0));
  }
};

// Minimizer of obj on the line {origin + t * dir}, |dir| = 1, by bisection on
// the (monotone) directional derivative.
Vector line_minimizer(const DualObjective& obj, const Vector& origin, const Vector& dir) {
  auto slope = [&](double t) {
    const Vector w = origin + t * dir - obj.center;
    return dir.dot(obj.b) + std::pow(w.norm(), obj.p - 1.0) * dir.dot(w) / obj.beta;
  };
  const double c = dir.dot(obj.center - origin);
  double radius = 1.0 + (obj.center - origin - c * dir).norm() + 2.0 * std::pow(obj.beta * obj.b.norm(), 1.0 / obj.p);
  while (slope(c - radius) > 0 || slope(c + radius) < 0) radius *= 2.0;
  double lo = c - radius, hi = c + radius;
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (slope(mid) < 0 ? lo : hi) = mid;
  }
  return origin + 0.5 * (lo + hi) * dir;
}

}  // namespace

Vector dual_prox_oracle(const CompositeProblem& prob, const Vector& multiplier,
                        const AlmConfig& cfg) {
  prob.validate();
  const auto* dense = dynamic_cast<const DenseLinearMap*>(prob.a.get());
  if (!dense || prob.f.name != "l1")
    throw std::invalid_argument("dual_prox_oracle: needs an l1 objective and a dense A");
  const Eigen::Index m = prob.b.size();
  if (m < 1 || m > 2) throw std::invalid_argument("dual_prox_oracle: only m <= 2 is tractable");
  if (multiplier.size() != m) throw std::invalid_argument("dual_prox_oracle: multiplier size");

  const DualObjective obj{dense->matrix(), prob.b, multiplier, cfg.beta, cfg.p.value()};
  const Matrix& a = dense->matrix();

  // The minimizer is the unconstrained one, or lies on a face of the polygon
  // |A^T u|_inf <= 1: on a constraint line or at a vertex. Enumerate all.
  std::vector<Vector> candidates;
  const double bn = prob.b.norm();
  candidates.push_back(bn > 0 ? Vector(multiplier - std::pow(cfg.beta, cfg.p.inv()) *
                                                        std::pow(bn, cfg.p.inv() - 1.0) * prob.b)
                              : multiplier);
  std::vector<std::pair<Vector, double>> lines;  // normal, offset
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const Vector normal = a.col(j);
    if (normal.norm() == 0.0) continue;
    for (double side : {-1.0, 1.0}) lines.emplace_back(normal, side);
  }
  for (const auto& [normal, offset] : lines) {
    const Vector origin = offset * normal / normal.squaredNorm();
    if (m == 1) {
      candidates.push_back(origin);
      continue;
    }
    const Vector dir = Vector{{-normal(1), normal(0)}} / normal.norm();
    candidates.push_back(line_minimizer(obj, origin, dir));
  }
  if (m == 2)
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t k = i + 1; k < lines.size(); ++k) {
        Matrix n2(2, 2);
        n2.row(0) = lines[i].first.transpose();
        n2.row(1) = lines[k].first.transpose();
        const double det = n2.determinant();
        if (std::abs(det) <= 1e-12 * n2.norm() * n2.norm()) continue;
        candidates.push_back(n2.partialPivLu().solve(Vector{{lines[i].second, lines[k].second}}));
      }

  std::optional<Vector> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const Vector& u : candidates) {
    if (!obj.feasible(u)) continue;
    if (const double value = obj(u); value < best_value) {
      best_value = value;
      best = u;
    }
  }
  if (!best) throw std::runtime_error("dual_prox_oracle: no feasible candidate");
  return *best;
}

}  // namespace hoalm
