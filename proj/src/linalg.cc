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

#include "lrv/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrv {
namespace {

void RequireSameShape(const DenseMatrix& a, const DenseMatrix& b,
                      const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         a.ShapeString() + " vs " + b.ShapeString());
  }
}

void RequireFinite(const DenseMatrix& m, const char* op) {
  if (!m.AllFinite()) {
    throw NumericError(std::string(op) + ": non-finite result");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("DenseMatrix: payload of " +
                         std::to_string(data_.size()) + " values for shape " +
                         ShapeString());
  }
  RequireFinite(*this, "DenseMatrix");
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  RequireFinite(*this, "DenseMatrix");
}

DenseMatrix DenseMatrix::Identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::Sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double DenseMatrix::MinCoeff() const {
  if (data_.empty()) return std::numeric_limits<double>::infinity();
  return *std::min_element(data_.begin(), data_.end());
}

double DenseMatrix::MaxCoeff() const {
  if (data_.empty()) return -std::numeric_limits<double>::infinity();
  return *std::max_element(data_.begin(), data_.end());
}

bool DenseMatrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

DenseMatrix DenseMatrix::Transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::vector<double> DenseMatrix::RowSums() const {
  std::vector<double> sums(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (double v : row(r)) sums[r] += v;
  return sums;
}

std::string DenseMatrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix MatMul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("MatMul: cannot multiply " + a.ShapeString() +
                         " by " + b.ShapeString());
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  RequireFinite(out, "MatMul");
  return out;
}

DenseMatrix MatMulTransposeA(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("MatMulTransposeA: cannot multiply transpose of " +
                         a.ShapeString() + " by " + b.ShapeString());
  }
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
      out(i, j) = acc;
    }
  }
  RequireFinite(out, "MatMulTransposeA");
  return out;
}

DenseMatrix MatMulTransposeB(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("MatMulTransposeB: cannot multiply " +
                         a.ShapeString() + " by transpose of " +
                         b.ShapeString());
  }
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
      out(i, j) = acc;
    }
  }
  RequireFinite(out, "MatMulTransposeB");
  return out;
}

DenseMatrix Relu(const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& v : out.mutable_data()) v = v > 0.0 ? v : 0.0;
  return out;
}

DenseMatrix ClampNonnegative(const DenseMatrix& a) { return Relu(a); }

DenseMatrix Add(const DenseMatrix& a, const DenseMatrix& b) {
  RequireSameShape(a, b, "Add");
  DenseMatrix out = a;
  auto& d = out.mutable_data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += b.data()[i];
  RequireFinite(out, "Add");
  return out;
}

DenseMatrix Scale(const DenseMatrix& a, double factor) {
  DenseMatrix out = a;
  for (double& v : out.mutable_data()) v *= factor;
  RequireFinite(out, "Scale");
  return out;
}

DenseMatrix GateByPositive(const DenseMatrix& grad, const DenseMatrix& gate) {
  RequireSameShape(grad, gate, "GateByPositive");
  DenseMatrix out = grad;
  auto& d = out.mutable_data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(gate.data()[i] > 0.0)) d[i] = 0.0;
  }
  return out;
}

LossAndGrad SoftmaxCrossEntropy(const DenseMatrix& logits, std::size_t gold) {
  if (logits.rows() != 1 || logits.cols() == 0) {
    throw DimensionError("SoftmaxCrossEntropy: expected 1xC logits, got " +
                         logits.ShapeString());
  }
  if (gold >= logits.cols()) {
    throw std::out_of_range("SoftmaxCrossEntropy: gold class " +
                            std::to_string(gold) + " outside [0, " +
                            std::to_string(logits.cols()) + ")");
  }
  const double top = logits.MaxCoeff();
  double denom = 0.0;
  for (double v : logits.data()) denom += std::exp(v - top);
  const double log_denom = std::log(denom);

  LossAndGrad out;
  out.grad = DenseMatrix(1, logits.cols());
  for (std::size_t c = 0; c < logits.cols(); ++c) {
    out.grad(0, c) = std::exp(logits(0, c) - top - log_denom);
  }
  out.grad(0, gold) -= 1.0;
  out.loss = -(logits(0, gold) - top - log_denom);
  return out;
}

ColumnMax ColumnMaxWithArgmax(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError("ColumnMaxWithArgmax: empty matrix " +
                         a.ShapeString());
  }
  ColumnMax out{DenseMatrix(1, a.cols()), std::vector<std::size_t>(a.cols(), 0)};
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double best = a(0, c);
    std::size_t best_row = 0;
    for (std::size_t r = 1; r < a.rows(); ++r) {
      if (a(r, c) > best) {
        best = a(r, c);
        best_row = r;
      }
    }
    out.values(0, c) = best;
    out.rows[c] = best_row;
  }
  return out;
}

AdamState AdamState::ForShape(std::size_t rows, std::size_t cols) {
  return AdamState{0, DenseMatrix(rows, cols), DenseMatrix(rows, cols)};
}

void AdamStep(DenseMatrix& param, const DenseMatrix& grad, AdamState& state,
              const AdamConfig& config) {
  RequireSameShape(param, grad, "AdamStep");
  RequireSameShape(param, state.first_moment, "AdamStep(first moment)");
  RequireSameShape(param, state.second_moment, "AdamStep(second moment)");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  auto& p = param.mutable_data();
  auto& m = state.first_moment.mutable_data();
  auto& v = state.second_moment.mutable_data();
  const auto& g = grad.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
  RequireFinite(param, "AdamStep");
}

}  // namespace lrv
