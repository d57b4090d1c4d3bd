/*
 * Copyright 2026 The LRV Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"
#include "lrv/linalg.h"
#include "support/test_support.h"

namespace lrv {
namespace {

TEST(DenseMatrixTest, ConstructorRejectsWrongLengthAndNonFinite) {
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  EXPECT_THROW(DenseMatrix(1, 2, std::vector<double>{1, NAN}), NumericError);
  EXPECT_THROW(DenseMatrix(1, 1, std::vector<double>{INFINITY}), NumericError);
  EXPECT_THROW((DenseMatrix{{1, 2}, {3}}), DimensionError);
}

TEST(DenseMatrixTest, Reductions) {
  const DenseMatrix m{{1, -2, 3}, {4, 5, -6}};
  EXPECT_EQ(m.Sum(), 5.0);
  EXPECT_EQ(m.MinCoeff(), -6.0);
  EXPECT_EQ(m.MaxCoeff(), 5.0);
  EXPECT_EQ(m.RowSums(), (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(m.Transpose(), (DenseMatrix{{1, 4}, {-2, 5}, {3, -6}}));
  EXPECT_EQ(m.ShapeString(), "2x3");
}

TEST(MatMulTest, HandComputedProduct) {
  const DenseMatrix a{{1, 2}, {3, 4}};
  const DenseMatrix b{{5, 6, 7}, {8, 9, 10}};
  EXPECT_EQ(MatMul(a, b), (DenseMatrix{{21, 24, 27}, {47, 54, 61}}));
  EXPECT_THROW(MatMul(b, b), DimensionError);
}

TEST(MatMulTest, TransposedVariantsAgreeWithExplicitTranspose) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = testing::RandomMatrix(rng, 4, 3, -2, 2);
    const DenseMatrix b = testing::RandomMatrix(rng, 4, 5, -2, 2);
    const DenseMatrix c = testing::RandomMatrix(rng, 6, 3, -2, 2);
    EXPECT_EQ(MatMulTransposeA(a, b), MatMul(a.Transpose(), b));
    EXPECT_EQ(MatMulTransposeB(a, c), MatMul(a, c.Transpose()));
  }
}

TEST(ElementwiseTest, ReluClampGateAddScale) {
  const DenseMatrix m{{-1, 0, 2}};
  EXPECT_EQ(Relu(m), (DenseMatrix{{0, 0, 2}}));
  EXPECT_EQ(ClampNonnegative(m), (DenseMatrix{{0, 0, 2}}));
  EXPECT_EQ(GateByPositive(DenseMatrix{{7, 8, 9}}, m), (DenseMatrix{{0, 0, 9}}));
  EXPECT_EQ(Add(m, m), (DenseMatrix{{-2, 0, 4}}));
  EXPECT_EQ(Scale(m, 0.5), (DenseMatrix{{-0.5, 0, 1}}));
  EXPECT_THROW(Add(m, DenseMatrix(3, 1)), DimensionError);
}

TEST(SoftmaxCrossEntropyTest, MatchesLogSumExp) {
  const DenseMatrix logits{{0.5, -1.0, 2.0, 0.0}};
  const auto result = SoftmaxCrossEntropy(logits, 2);
  long double sum = 0.0L;
  for (double v : logits.data()) sum += std::exp(static_cast<long double>(v));
  EXPECT_NEAR(result.loss, static_cast<double>(std::log(sum) - 2.0L), 1e-15);
  double grad_sum = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    const double p = static_cast<double>(std::exp(static_cast<long double>(logits(0, c))) / sum);
    EXPECT_NEAR(result.grad(0, c), p - (c == 2 ? 1.0 : 0.0), 1e-15);
    grad_sum += result.grad(0, c);
  }
  EXPECT_NEAR(grad_sum, 0.0, 1e-15);
}

TEST(SoftmaxCrossEntropyTest, StableForLargeLogits) {
  const auto result = SoftmaxCrossEntropy(DenseMatrix{{1000.0, 0.0}}, 0);
  EXPECT_TRUE(std::isfinite(result.loss));
  EXPECT_NEAR(result.loss, 0.0, 1e-12);
  EXPECT_THROW(SoftmaxCrossEntropy(DenseMatrix{{1.0, 2.0}}, 2), std::out_of_range);
}

TEST(ColumnMaxTest, TiesGoToLowestRow) {
  const DenseMatrix m{{1, 5, 2}, {3, 5, 2}, {0, 1, 2}};
  const ColumnMax max = ColumnMaxWithArgmax(m);
  EXPECT_EQ(max.values, (DenseMatrix{{3, 5, 2}}));
  EXPECT_EQ(max.rows, (std::vector<std::size_t>{1, 0, 0}));
}

TEST(AdamTest, FirstStepMovesEachEntryByLearningRate) {
  // After one step m_hat = g and v_hat = g^2, so the step is
  // lr * g / (|g| + eps).
  DenseMatrix param{{1.0, -2.0, 0.5}};
  const DenseMatrix grad{{0.3, -4.0, 0.0}};
  AdamState state = AdamState::ForShape(1, 3);
  AdamConfig config;
  config.learning_rate = 0.01;
  AdamStep(param, grad, state, config);
  EXPECT_EQ(state.step, 1u);
  EXPECT_NEAR(param(0, 0), 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(param(0, 1), -2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(param(0, 2), 0.5);
}

TEST(AdamTest, ZeroLearningRateLeavesParamsUnchanged) {
  DenseMatrix param{{1.0, 2.0}};
  const DenseMatrix before = param;
  AdamState state = AdamState::ForShape(1, 2);
  AdamConfig config;
  config.learning_rate = 0.0;
  for (int k = 0; k < 5; ++k) AdamStep(param, DenseMatrix{{1.0, -1.0}}, state, config);
  EXPECT_EQ(param, before);
}

}  // namespace
}  // namespace lrv
