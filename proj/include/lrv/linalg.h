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

// Dense float64 matrix kernel: products, elementwise ops, the softmax
// cross-entropy objective and the Adam update used by the classifier.

#ifndef LRV_LINALG_H_
#define LRV_LINALG_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrv {

// Thrown when operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a computation produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major real matrix. Entries are kept finite by every public operation.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Takes ownership of `data`; its length must be rows * cols and every
  // entry finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  // Nested-list constructor, mostly for tests: {{1, 2}, {3, 4}}.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

  double Sum() const;
  double MinCoeff() const;
  double MaxCoeff() const;
  bool AllFinite() const;
  DenseMatrix Transpose() const;
  // Per-row sums, length rows().
  std::vector<double> RowSums() const;

  // "2x3" style, used in error messages.
  std::string ShapeString() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Standard product. The inner loop runs over the shared dimension in
// ascending order, so results are bit-reproducible.
DenseMatrix MatMul(const DenseMatrix& a, const DenseMatrix& b);

// a^T * b without materializing the transpose.
DenseMatrix MatMulTransposeA(const DenseMatrix& a, const DenseMatrix& b);

// a * b^T without materializing the transpose.
DenseMatrix MatMulTransposeB(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix Relu(const DenseMatrix& a);

// Entrywise max(0, x). Used to keep the output layer weights nonnegative.
DenseMatrix ClampNonnegative(const DenseMatrix& a);

DenseMatrix Add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix Scale(const DenseMatrix& a, double factor);

// Elementwise mask: out(i, j) = grad(i, j) if gate(i, j) > 0, else 0.
DenseMatrix GateByPositive(const DenseMatrix& grad, const DenseMatrix& gate);

struct LossAndGrad {
  double loss = 0.0;
  DenseMatrix grad;  // 1 x C, p - onehot(gold)
};

// Max-subtracted softmax followed by -log p[gold]. `logits` must be 1 x C.
// Throws std::out_of_range if gold is not a valid column.
LossAndGrad SoftmaxCrossEntropy(const DenseMatrix& logits, std::size_t gold);

struct ColumnMax {
  DenseMatrix values;             // 1 x cols
  std::vector<std::size_t> rows;  // winning row per column
};

// Per-column maximum; ties go to the lowest row index.
ColumnMax ColumnMaxWithArgmax(const DenseMatrix& a);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Optimizer state for a single parameter matrix.
struct AdamState {
  std::size_t step = 0;
  DenseMatrix first_moment;
  DenseMatrix second_moment;

  static AdamState ForShape(std::size_t rows, std::size_t cols);
};

// Bias-corrected Adam update of `param` in place; increments state.step.
void AdamStep(DenseMatrix& param, const DenseMatrix& grad, AdamState& state,
              const AdamConfig& config);

}  // namespace lrv

#endif  // LRV_LINALG_H_
