#include <gtest/gtest.h>

#include "hoalm/problems.hpp"
#include "hoalm/vi.hpp"
#include "test_util.hpp"

#include <cmath>

using hoalm::Matrix;
using hoalm::Order;
using hoalm::PpaConfig;
using hoalm::Vector;

namespace {

hoalm::MonotoneOperator identity_operator(std::optional<Vector> solution = {}) {
  return hoalm::make_affine_operator(Matrix::Identity(1, 1), Vector::Zero(1), solution);
}

PpaConfig config(double p, double lambda, int iters = 100) {
  PpaConfig cfg;
  cfg.p = Order(p);
  cfg.lambda = lambda;
  cfg.max_iters = iters;
  return cfg;
}

// Plain bisection on a scalar function with a sign change on [lo, hi].
double bisect(const std::function<double(double)>& h, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((h(lo) < 0) == (h(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double optimality_residual(const hoalm::MonotoneOperator& op, const Vector& xk, const Vector& x,
                           const PpaConfig& cfg) {
  const Vector d = x - xk;
  const double scale = cfg.p.is_one() ? 1.0 : std::pow(d.norm(), cfg.p.value() - 1.0);
  return (cfg.lambda * op.evaluate(x) + scale * d).norm();
}

}  // namespace

TEST(PpaStepAffine, OrderOneHalves) {
  auto step = hoalm::ppa_step_affine(identity_operator(), Vector::Ones(1), config(1, 1));
  EXPECT_NEAR(step.x(0), 0.5, 1e-15);
}

TEST(PpaStepAffine, OrderTwoScalarRoot) {
  const double oracle = bisect([](double x) { return x - (1 - x) * (1 - x); }, 0.0, 1.0);
  auto step = hoalm::ppa_step_affine(identity_operator(), Vector::Ones(1), config(2, 1));
  EXPECT_NEAR(step.x(0), oracle, 1e-12);
  EXPECT_NEAR(step.x(0), 0.3819660, 1e-7);
}

TEST(PpaStepAffine, StationaryPointIsFixed) {
  Matrix m{{2.0, 0.5}, {0.5, 1.0}};
  Vector x_star{{1.0, -2.0}};
  auto op = hoalm::make_affine_operator(m, -(m * x_star), x_star);
  for (double p : {1.0, 2.0, 3.0}) {
    auto step = hoalm::ppa_step_affine(op, x_star, config(p, 1));
    EXPECT_EQ(step.x, x_star);
    EXPECT_EQ(step.root_iterations, 0);
  }
}

TEST(PpaStepAffine, OptimalityEquation) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = hoalm::gen_vi_affine(12, seed);
    testutil::Gen gen(static_cast<unsigned>(seed));
    for (double p : {1.0, 1.5, 2.0, 3.0})
      for (double lambda : {1e-3, 1.0, 50.0}) {
        const PpaConfig cfg = config(p, lambda);
        const Vector xk = gen.vec(12);
        auto step = hoalm::ppa_step_affine(inst.op, xk, cfg);
        const double scale = std::max(1.0, lambda * inst.op.affine->q.norm());
        EXPECT_LE(optimality_residual(inst.op, xk, step.x, cfg), 1e-10 * scale)
            << "p=" << p << " lambda=" << lambda;
      }
  }
}

TEST(PpaStepAffine, NonsymmetricMonotone) {
  // Skew part plus a PSD part: monotone but not symmetric.
  Matrix m{{1.0, 2.0}, {-2.0, 0.5}};
  Vector q{{1.0, -1.0}};
  auto op = hoalm::make_affine_operator(m, q);
  Vector xk{{0.3, 0.7}};
  for (double p : {1.0, 2.0, 3.0}) {
    const PpaConfig cfg = config(p, 0.7);
    auto step = hoalm::ppa_step_affine(op, xk, cfg);
    EXPECT_LE(optimality_residual(op, xk, step.x, cfg), 1e-10 * std::max(1.0, 0.7 * q.norm()));
  }
}

TEST(PpaStepAffine, Errors) {
  hoalm::MonotoneOperator op;
  op.evaluate = [](const Vector& x) { return x; };
  EXPECT_THROW(hoalm::ppa_step_affine(op, Vector::Ones(1), config(1, 1)), std::invalid_argument);
  EXPECT_THROW(hoalm::ppa_step_affine(identity_operator(), Vector::Ones(3), config(1, 1)),
               std::invalid_argument);
  PpaConfig bad = config(1, 1);
  bad.lambda = 0.0;
  EXPECT_THROW(hoalm::ppa_step_affine(identity_operator(), Vector::Ones(1), bad),
               std::invalid_argument);
  PpaConfig constrained = config(1, 1);
  constrained.domain = hoalm::Domain{[](const Vector& x) { return x; }};
  EXPECT_THROW(hoalm::run_ppa(identity_operator(), Vector::Ones(1), constrained),
               std::invalid_argument);
}

TEST(RunPpa, ExactHalving) {
  auto trace = hoalm::run_ppa(identity_operator(Vector::Zero(1)), Vector::Ones(1), config(1, 1, 10));
  ASSERT_EQ(trace.iterates.size(), 11u);
  for (std::size_t k = 0; k < trace.iterates.size(); ++k)
    EXPECT_DOUBLE_EQ(trace.iterates[k](0), std::ldexp(1.0, -static_cast<int>(k)));
  EXPECT_EQ(trace.steps(), 10u);
  EXPECT_EQ(trace.distances_to_solution.size(), 11u);
}

TEST(RunPpa, StepToleranceStopsEarly) {
  PpaConfig cfg = config(1, 1, 100);
  cfg.step_tol = 1e-3;
  auto trace = hoalm::run_ppa(identity_operator(), Vector::Ones(1), cfg);
  EXPECT_LT(trace.steps(), 100u);
  EXPECT_LE(trace.step_norms.back(), 1e-3);
  EXPECT_GT(trace.step_norms[trace.steps() - 2], 1e-3);
}

TEST(RunPpa, ExactStepOracle) {
  hoalm::MonotoneOperator op;
  op.evaluate = [](const Vector& x) { return x; };
  op.exact_step = [](const Vector& xk, const PpaConfig& cfg) -> Vector {
    return xk / (1.0 + cfg.lambda);
  };
  auto trace = hoalm::run_ppa(op, Vector::Ones(1), config(1, 3, 4));
  EXPECT_DOUBLE_EQ(trace.iterates.back()(0), 1.0 / 256.0);
  hoalm::MonotoneOperator bare;
  bare.evaluate = op.evaluate;
  EXPECT_THROW(hoalm::run_ppa(bare, Vector::Ones(1), config(1, 1)), std::invalid_argument);
}

TEST(RunPpa, ContractionInequalities) {
  auto inst = hoalm::gen_vi_affine(20, 3);
  const Vector& x_star = *inst.op.known_solution;
  for (double p : {1.0, 2.0, 3.0}) {
    auto trace = hoalm::run_ppa(inst.op, inst.x0, config(p, 1.0, 200));
    const double r0 = (inst.x0 - x_star).norm();
    for (std::size_t k = 0; k < trace.steps(); ++k) {
      const double dk = (trace.iterates[k] - x_star).norm();
      const double dk1 = (trace.iterates[k + 1] - x_star).norm();
      const double step = trace.step_norms[k];
      EXPECT_LE(dk1 * dk1 + step * step, dk * dk + 1e-9);
      if (k > 0) EXPECT_LE(step, trace.step_norms[k - 1] + 1e-9);
      EXPECT_LE(step * step, r0 * r0 / static_cast<double>(k + 1) + 1e-9);
      EXPECT_LE(trace.residual_norms[k],
                std::pow(r0, p) / std::pow(static_cast<double>(k + 1), p / 2.0) + 1e-9);
    }
  }
}

TEST(RunPpa, ResidualEqualsStepPower) {
  auto inst = hoalm::gen_vi_affine(20, 4);
  for (double p : {1.0, 2.0, 3.0}) {
    auto trace = hoalm::run_ppa(inst.op, inst.x0, config(p, 1e-3, 200));
    for (std::size_t k = 0; k < trace.steps(); ++k) {
      const double rhs = std::pow(trace.step_norms[k], p);
      EXPECT_NEAR(trace.residual_norms[k], rhs, 1e-8 * rhs) << "p=" << p << " k=" << k;
    }
  }
}

TEST(RunPpa, Deterministic) {
  auto inst = hoalm::gen_vi_affine(10, 9);
  auto a = hoalm::run_ppa(inst.op, inst.x0, config(2, 1, 30));
  auto b = hoalm::run_ppa(inst.op, inst.x0, config(2, 1, 30));
  ASSERT_EQ(a.iterates.size(), b.iterates.size());
  for (std::size_t k = 0; k < a.iterates.size(); ++k) EXPECT_EQ(a.iterates[k], b.iterates[k]);
  EXPECT_EQ(a.step_norms, b.step_norms);
  EXPECT_EQ(a.residual_norms, b.residual_norms);
}

TEST(NaturalResidual, Examples) {
  auto op = hoalm::make_affine_operator(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_EQ(hoalm::natural_residual(op, Vector::Zero(2), config(1, 1)), 0.0);
  EXPECT_DOUBLE_EQ(hoalm::natural_residual(op, Vector{{3.0, 4.0}}, config(1, 1)), 5.0);
}

TEST(NaturalResidual, BoundAtFinalIterate) {
  auto inst = hoalm::gen_vi_affine(20, 6);
  const double r0 = (inst.x0 - *inst.op.known_solution).norm();
  for (double p : {1.0, 2.0, 3.0}) {
    const PpaConfig cfg = config(p, 0.5, 50);
    auto trace = hoalm::run_ppa(inst.op, inst.x0, cfg);
    const double k = static_cast<double>(trace.steps());
    const double bound = std::pow(r0, p) / std::pow(k, p / 2.0) / cfg.lambda;
    EXPECT_LE(hoalm::natural_residual(inst.op, trace.iterates.back(), cfg), bound + 1e-9);
  }
}

TEST(MonotoneOperator, GeneratedInstanceIsMonotone) {
  auto inst = hoalm::gen_vi_affine(15, 2);
  const Matrix& m = inst.op.affine->m;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m + m.transpose());
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  testutil::Gen gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = gen.vec(15), y = gen.vec(15);
    EXPECT_GE((inst.op.evaluate(x) - inst.op.evaluate(y)).dot(x - y), -1e-10);
  }
  EXPECT_LE(inst.op.evaluate(*inst.op.known_solution).norm(), 1e-12);
}

TEST(MonotoneOperator, AffineShapeValidation) {
  EXPECT_THROW(hoalm::make_affine_operator(Matrix::Identity(2, 3), Vector::Zero(2)),
               std::invalid_argument);
  EXPECT_THROW(hoalm::make_affine_operator(Matrix::Identity(2, 2), Vector::Zero(3)),
               std::invalid_argument);
}
