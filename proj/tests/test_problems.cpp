#include <gtest/gtest.h>

#include "hoalm/linear_map.hpp"
#include "hoalm/problems.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using hoalm::Matrix;
using hoalm::Vector;

TEST(SeededRng, UniformMatchesEngineBits) {
  std::mt19937_64 engine(42);
  hoalm::SeededRng rng(42);
  for (int i = 0; i < 100; ++i) {
    const double expected = static_cast<double>(engine() >> 11) / 9007199254740992.0;
    EXPECT_EQ(rng.uniform(), expected);
  }
}

TEST(SeededRng, SubsetIsSortedAndDistinct) {
  hoalm::SeededRng rng(3);
  const auto idx = rng.subset(50, 20);
  ASSERT_EQ(idx.size(), 20u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(std::set<Eigen::Index>(idx.begin(), idx.end()).size(), 20u);
  EXPECT_GE(idx.front(), 0);
  EXPECT_LT(idx.back(), 50);
  EXPECT_EQ(rng.subset(5, 5), (std::vector<Eigen::Index>{0, 1, 2, 3, 4}));
  EXPECT_THROW(rng.subset(3, 4), std::invalid_argument);
}

TEST(SeededRng, NormalMoments) {
  hoalm::SeededRng rng(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(GenBp, DefaultDimensions) {
  const auto inst = hoalm::gen_bp(100, 500, 0.2, 0);
  EXPECT_EQ(inst.a.rows(), 100);
  EXPECT_EQ(inst.a.cols(), 500);
  EXPECT_EQ((inst.u0.array() != 0.0).count(), 100);
  EXPECT_EQ((inst.b - inst.a * inst.u0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GenBp, FullDensity) {
  const auto inst = hoalm::gen_bp(5, 8, 1.0, 1);
  EXPECT_EQ((inst.u0.array() != 0.0).count(), 8);
}

TEST(GenBp, Deterministic) {
  const auto a = hoalm::gen_bp(10, 30, 0.3, 7);
  const auto b = hoalm::gen_bp(10, 30, 0.3, 7);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.u0, b.u0);
  EXPECT_EQ(a.b, b.b);
  const auto c = hoalm::gen_bp(10, 30, 0.3, 8);
  EXPECT_NE(a.a, c.a);
}

TEST(GenBp, Errors) {
  EXPECT_THROW(hoalm::gen_bp(10, 30, 0.01, 0), std::invalid_argument);
  EXPECT_THROW(hoalm::gen_bp(10, 30, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(hoalm::gen_bp(10, 30, 1.5, 0), std::invalid_argument);
  EXPECT_THROW(hoalm::gen_bp(0, 30, 0.5, 0), std::invalid_argument);
}

TEST(GenBp, OverdeterminedWarns) {
  testing::internal::CaptureStderr();
  const auto inst = hoalm::gen_bp(6, 4, 0.5, 0);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("warning"), std::string::npos);
  EXPECT_EQ(inst.a.rows(), 6);
}

TEST(GenMc, DefaultDimensions) {
  const auto inst = hoalm::gen_mc(50, 50, 0.1, 0);
  EXPECT_EQ(inst.observed.size(), 250u);
  EXPECT_EQ((inst.full.array() != 0.0).count(), 250);
  EXPECT_TRUE(std::is_sorted(inst.observed.begin(), inst.observed.end()));
  // b lists the observed values in row-major order.
  for (std::size_t k = 0; k < inst.observed.size(); ++k) {
    const auto idx = inst.observed[k];
    EXPECT_EQ(inst.b(static_cast<Eigen::Index>(k)), inst.full(idx / 50, idx % 50));
  }
}

TEST(GenMc, SingleObservedEntry) {
  const auto inst = hoalm::gen_mc(4, 5, 0.05, 2);
  EXPECT_EQ(inst.observed.size(), 1u);
  EXPECT_THROW(hoalm::gen_mc(4, 5, 0.01, 2), std::invalid_argument);
}

TEST(MaskOperator, AdjointConsistency) {
  const auto inst = hoalm::gen_mc(50, 50, 0.1, 1);
  const auto map = inst.mask();
  testutil::Gen gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix x = gen.mat(50, 50);
    const Vector y = gen.vec(250);
    const Matrix ax = hoalm::apply_mask_operator(inst, x, hoalm::MaskMode::forward);
    const Matrix aty = hoalm::apply_mask_operator(inst, y, hoalm::MaskMode::adjoint);
    EXPECT_NEAR(ax.col(0).dot(y), (x.array() * aty.array()).sum(), 1e-12 * std::max(1.0, x.norm() * y.norm()));
    // Vector-level map agrees with the matrix-level one.
    const Vector xv = hoalm::flatten_row_major(x);
    EXPECT_NEAR(map->apply(xv).dot(y), xv.dot(map->adjoint(y)), 1e-12 * std::max(1.0, x.norm() * y.norm()));
    EXPECT_EQ(map->apply(xv), ax.col(0));
  }
}

TEST(MaskOperator, ForwardThenAdjointMasks) {
  const auto inst = hoalm::gen_mc(6, 7, 0.3, 4);
  testutil::Gen gen(2);
  const Matrix x = gen.mat(6, 7);
  const Matrix back = hoalm::apply_mask_operator(
      inst, hoalm::apply_mask_operator(inst, x, hoalm::MaskMode::forward), hoalm::MaskMode::adjoint);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 7; ++j) {
      const bool seen = std::binary_search(inst.observed.begin(), inst.observed.end(), i * 7 + j);
      EXPECT_EQ(back(i, j), seen ? x(i, j) : 0.0);
    }
  EXPECT_EQ(hoalm::apply_mask_operator(inst, Matrix::Zero(6, 7), hoalm::MaskMode::forward),
            Matrix::Zero(static_cast<Eigen::Index>(inst.observed.size()), 1));
}

TEST(MaskOperator, UnitNorm) {
  const auto inst = hoalm::gen_mc(50, 50, 0.1, 0);
  EXPECT_NEAR(hoalm::spectral_norm_estimate(*inst.mask()), 1.0, 1e-9);
}

TEST(MaskOperator, ShapeErrors) {
  const auto inst = hoalm::gen_mc(4, 5, 0.5, 0);
  EXPECT_THROW(hoalm::apply_mask_operator(inst, Matrix::Zero(5, 4), hoalm::MaskMode::forward),
               std::invalid_argument);
  EXPECT_THROW(hoalm::apply_mask_operator(inst, Matrix::Zero(3, 1), hoalm::MaskMode::adjoint),
               std::invalid_argument);
  EXPECT_THROW(hoalm::MaskLinearMap(2, 2, {3, 1}), std::invalid_argument);
  EXPECT_THROW(hoalm::MaskLinearMap(2, 2, {0, 4}), std::invalid_argument);
}

TEST(DenseLinearMap, AdjointConsistency) {
  testutil::Gen gen(3);
  const Matrix a = gen.mat(7, 11);
  hoalm::DenseLinearMap map(a);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = gen.vec(11), y = gen.vec(7);
    EXPECT_NEAR(map.apply(x).dot(y), x.dot(map.adjoint(y)), 1e-10);
  }
  EXPECT_NEAR(map.norm_estimate(1e-10), Eigen::JacobiSVD<Matrix>(a).singularValues()(0), 1e-6);
}

TEST(GenViAffine, KnownSolution) {
  const auto inst = hoalm::gen_vi_affine(20, 0);
  ASSERT_TRUE(inst.op.known_solution.has_value());
  EXPECT_LE(inst.op.evaluate(*inst.op.known_solution).norm(), 1e-12);
  EXPECT_EQ(inst.op.affine->m, inst.op.affine->m.transpose());
  EXPECT_EQ(inst.x0, Vector::Zero(20));
}

TEST(InstanceDump, BasisPursuitRoundTrip) {
  const auto inst = hoalm::gen_bp(4, 9, 0.4, 5);
  std::stringstream ss;
  hoalm::write_instance(ss, inst);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header.rfind("bp 4 9 ", 0), 0u);
  ss.seekg(0);
  const auto back = hoalm::read_bp_instance(ss);
  EXPECT_EQ(back.a, inst.a);
  EXPECT_EQ(back.u0, inst.u0);
  EXPECT_EQ(back.b, inst.b);
  EXPECT_EQ(back.seed, 5u);
  EXPECT_EQ(back.density, 0.4);
}

TEST(InstanceDump, MatrixCompletionRoundTrip) {
  const auto inst = hoalm::gen_mc(5, 6, 0.3, 2);
  std::stringstream ss;
  hoalm::write_instance(ss, inst);
  const auto back = hoalm::read_mc_instance(ss);
  EXPECT_EQ(back.full, inst.full);
  EXPECT_EQ(back.observed, inst.observed);
  EXPECT_EQ(back.b, inst.b);
}

TEST(InstanceDump, StreamStateRestored) {
  std::stringstream ss;
  ss.precision(3);
  hoalm::write_instance(ss, hoalm::gen_bp(2, 3, 1.0, 0));
  EXPECT_EQ(ss.precision(), 3);
}

TEST(InstanceDump, BadInput) {
  std::stringstream wrong_kind("mc 2 2 0.5 0\n");
  EXPECT_THROW(hoalm::read_bp_instance(wrong_kind), std::runtime_error);
  std::stringstream truncated("bp 2 2 0.5 0\n1 2 3\n");
  EXPECT_THROW(hoalm::read_bp_instance(truncated), std::runtime_error);
}
