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

#include "lrv/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrv/metrics.h"

namespace lrv {
namespace {

void RequireShape(const DenseMatrix& m, std::size_t rows, std::size_t cols,
                  const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(what + " is " + m.ShapeString() + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix GlorotUniform(std::size_t fan_in, std::size_t fan_out,
                          SplitMix& rng, bool nonnegative) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix m(fan_in, fan_out);
  for (double& v : m.mutable_data()) {
    const double u = rng.Uniform();
    v = nonnegative ? limit * u : limit * (2.0 * u - 1.0);
  }
  return m;
}

// Rows [begin, end) of `m`.
DenseMatrix RowSlice(const DenseMatrix& m, std::size_t begin, std::size_t end) {
  std::vector<double> data(m.data().begin() + begin * m.cols(),
                           m.data().begin() + end * m.cols());
  return DenseMatrix(end - begin, m.cols(), std::move(data));
}

struct PreparedGraph {
  NormalizedAdjacency adjacency;
  DenseMatrix h0;
  std::size_t gold;
};

std::vector<PreparedGraph> Prepare(const std::vector<SentenceGraph>& graphs,
                                   const EmbeddingTable& table) {
  std::vector<PreparedGraph> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) {
    out.push_back({BuildAdjacency(g), EmbedSentence(g, table),
                   LabelIndex(g.gold)});
  }
  return out;
}

}  // namespace

SplitMix::SplitMix(std::uint64_t seed) : state_(seed) {}

std::uint64_t SplitMix::Next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

std::size_t SplitMix::Below(std::size_t bound) {
  if (bound == 0) return 0;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

void ModelParams::Validate() const {
  RequireShape(w0, shape.input_dim, shape.hidden1, "W0");
  RequireShape(w1, shape.hidden1, shape.hidden2, "W1");
  RequireShape(wfc, shape.hidden2, shape.classes, "Wfc");
}

ModelParams InitParams(const ModelShape& shape) {
  if (shape.input_dim == 0 || shape.hidden1 == 0 || shape.hidden2 == 0 ||
      shape.classes == 0) {
    throw DimensionError("InitParams: all dimensions must be positive");
  }
  SplitMix rng(shape.seed);
  ModelParams p;
  p.shape = shape;
  p.w0 = GlorotUniform(shape.input_dim, shape.hidden1, rng, false);
  p.w1 = GlorotUniform(shape.hidden1, shape.hidden2, rng, false);
  p.wfc = GlorotUniform(shape.hidden2, shape.classes, rng, true);
  return p;
}

ActivationCache Forward(const ModelParams& params,
                        const NormalizedAdjacency& adjacency,
                        const DenseMatrix& h0) {
  params.Validate();
  if (h0.cols() != params.shape.input_dim) {
    throw DimensionError("Forward(input): features are " + h0.ShapeString() +
                         " but W0 expects " +
                         std::to_string(params.shape.input_dim) + " columns");
  }
  if (adjacency.num_nodes() != h0.rows() || h0.rows() == 0) {
    throw DimensionError("Forward(adjacency): " +
                         adjacency.matrix().ShapeString() +
                         " adjacency for " + h0.ShapeString() + " features");
  }
  ActivationCache c;
  c.h0 = h0;
  c.z0 = Relu(MatMul(h0, params.w0));
  c.h1 = MatMul(adjacency.matrix(), c.z0);
  c.z1 = Relu(MatMul(c.h1, params.w1));
  c.h2 = MatMul(adjacency.matrix(), c.z1);
  ColumnMax pool = ColumnMaxWithArgmax(c.h2);
  c.pooled = std::move(pool.values);
  c.pool_argmax = std::move(pool.rows);
  c.logits = MatMul(c.pooled, params.wfc);
  return c;
}

void GraphBatch::Add(const NormalizedAdjacency& adjacency,
                     const DenseMatrix& h0) {
  if (adjacency.num_nodes() != h0.rows() || h0.rows() == 0) {
    throw DimensionError("GraphBatch: " + adjacency.matrix().ShapeString() +
                         " adjacency for " + h0.ShapeString() + " features");
  }
  if (!blocks_.empty() && h0.cols() != features_.cols()) {
    throw DimensionError("GraphBatch: feature width " +
                         std::to_string(h0.cols()) + " differs from batch " +
                         std::to_string(features_.cols()));
  }
  std::vector<double> stacked = features_.data();
  stacked.insert(stacked.end(), h0.data().begin(), h0.data().end());
  features_ = DenseMatrix(features_.rows() + h0.rows(), h0.cols(),
                          std::move(stacked));
  blocks_.push_back(adjacency.matrix());
  offsets_.push_back(offsets_.back() + h0.rows());
}

DenseMatrix GraphBatch::ApplyAdjacency(const DenseMatrix& x) const {
  if (x.rows() != num_rows()) {
    throw DimensionError("GraphBatch::ApplyAdjacency: " + x.ShapeString() +
                         " for " + std::to_string(num_rows()) + " rows");
  }
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const DenseMatrix part =
        MatMul(blocks_[k], RowSlice(x, offsets_[k], offsets_[k + 1]));
    std::copy(part.data().begin(), part.data().end(),
              out.mutable_data().begin() + offsets_[k] * x.cols());
  }
  return out;
}

BatchActivations ForwardBatch(const ModelParams& params,
                              const GraphBatch& batch) {
  params.Validate();
  if (batch.num_graphs() == 0) throw DimensionError("ForwardBatch: empty batch");
  if (batch.features().cols() != params.shape.input_dim) {
    throw DimensionError("ForwardBatch(input): features are " +
                         batch.features().ShapeString() + " but W0 expects " +
                         std::to_string(params.shape.input_dim) + " columns");
  }
  BatchActivations a;
  a.z0 = Relu(MatMul(batch.features(), params.w0));
  a.h1 = batch.ApplyAdjacency(a.z0);
  a.z1 = Relu(MatMul(a.h1, params.w1));
  a.h2 = batch.ApplyAdjacency(a.z1);
  a.pooled = DenseMatrix(batch.num_graphs(), params.shape.hidden2);
  const auto& off = batch.offsets();
  for (std::size_t g = 0; g < batch.num_graphs(); ++g) {
    ColumnMax pool = ColumnMaxWithArgmax(RowSlice(a.h2, off[g], off[g + 1]));
    std::copy(pool.values.data().begin(), pool.values.data().end(),
              a.pooled.row(g).begin());
    a.pool_argmax.push_back(std::move(pool.rows));
  }
  a.logits = MatMul(a.pooled, params.wfc);
  return a;
}

Gradients ComputeBatchGradients(const ModelParams& params,
                                const GraphBatch& batch,
                                std::span<const std::size_t> gold) {
  if (gold.size() != batch.num_graphs()) {
    throw DimensionError("ComputeBatchGradients: " +
                         std::to_string(gold.size()) + " labels for " +
                         std::to_string(batch.num_graphs()) + " graphs");
  }
  const BatchActivations a = ForwardBatch(params, batch);
  const std::size_t num_graphs = batch.num_graphs();
  const double inv_batch = 1.0 / static_cast<double>(num_graphs);

  Gradients g;
  DenseMatrix d_logits(num_graphs, params.shape.classes);
  for (std::size_t k = 0; k < num_graphs; ++k) {
    const DenseMatrix row(1, params.shape.classes,
                          std::vector<double>(a.logits.row(k).begin(),
                                              a.logits.row(k).end()));
    LossAndGrad lg = SoftmaxCrossEntropy(row, gold[k]);
    g.loss += lg.loss;
    for (std::size_t c = 0; c < params.shape.classes; ++c) {
      d_logits(k, c) = lg.grad(0, c) * inv_batch;
    }
  }
  g.loss *= inv_batch;

  g.wfc = MatMulTransposeA(a.pooled, d_logits);
  const DenseMatrix d_pooled = MatMulTransposeB(d_logits, params.wfc);

  // Max-pool routes each channel's gradient to its winning row.
  DenseMatrix d_h2(batch.num_rows(), params.shape.hidden2);
  const auto& off = batch.offsets();
  for (std::size_t k = 0; k < num_graphs; ++k) {
    for (std::size_t c = 0; c < params.shape.hidden2; ++c) {
      d_h2(off[k] + a.pool_argmax[k][c], c) = d_pooled(k, c);
    }
  }
  // Ã is symmetric, so Ã^T dH = Ã dH.
  const DenseMatrix d_z1 = batch.ApplyAdjacency(d_h2);
  const DenseMatrix d_p1 = GateByPositive(d_z1, a.z1);
  g.w1 = MatMulTransposeA(a.h1, d_p1);
  const DenseMatrix d_h1 = MatMulTransposeB(d_p1, params.w1);
  const DenseMatrix d_z0 = batch.ApplyAdjacency(d_h1);
  const DenseMatrix d_p0 = GateByPositive(d_z0, a.z0);
  g.w0 = MatMulTransposeA(batch.features(), d_p0);
  return g;
}

Gradients ComputeGradients(const ModelParams& params,
                           const NormalizedAdjacency& adjacency,
                           const DenseMatrix& h0, std::size_t gold) {
  GraphBatch batch;
  batch.Add(adjacency, h0);
  const std::size_t labels[] = {gold};
  return ComputeBatchGradients(params, batch, labels);
}

std::size_t ArgmaxClass(const DenseMatrix& logits_row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < logits_row.cols(); ++c) {
    if (logits_row(0, c) > logits_row(0, best)) best = c;
  }
  return best;
}

std::size_t Predict(const ModelParams& params,
                    const NormalizedAdjacency& adjacency,
                    const DenseMatrix& h0) {
  return ArgmaxClass(Forward(params, adjacency, h0).logits);
}

std::size_t Predict(const ModelParams& params, const SentenceGraph& graph,
                    const EmbeddingTable& table) {
  return Predict(params, BuildAdjacency(graph), EmbedSentence(graph, table));
}

std::vector<std::size_t> PredictAll(const ModelParams& params,
                                    const std::vector<SentenceGraph>& graphs,
                                    const EmbeddingTable& table) {
  std::vector<std::size_t> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(Predict(params, g, table));
  return out;
}

double MeanLoss(const ModelParams& params,
                const std::vector<SentenceGraph>& graphs,
                const EmbeddingTable& table) {
  if (graphs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& g : graphs) {
    const ActivationCache c =
        Forward(params, BuildAdjacency(g), EmbedSentence(g, table));
    total += SoftmaxCrossEntropy(c.logits, LabelIndex(g.gold)).loss;
  }
  return total / static_cast<double>(graphs.size());
}

TrainResult Train(const LabeledDataset& dataset, const EmbeddingTable& table,
                  const TrainConfig& config) {
  if (dataset.train.empty()) throw TrainingError("Train: empty train split");
  if (config.batch_size == 0) throw TrainingError("Train: batch size is 0");

  const std::vector<PreparedGraph> train = Prepare(dataset.train, table);
  std::vector<std::size_t> dev_gold;
  for (const auto& g : dataset.dev) dev_gold.push_back(LabelIndex(g.gold));

  ModelShape shape;
  shape.input_dim = table.dim();
  shape.hidden1 = config.hidden1;
  shape.hidden2 = config.hidden2;
  shape.classes = kNumLabels;
  shape.seed = config.seed;

  ModelParams params = InitParams(shape);
  AdamState s0 = AdamState::ForShape(params.w0.rows(), params.w0.cols());
  AdamState s1 = AdamState::ForShape(params.w1.rows(), params.w1.cols());
  AdamState sfc = AdamState::ForShape(params.wfc.rows(), params.wfc.cols());

  TrainResult result;
  result.initial_params = params;
  result.params = params;
  result.initial_train_loss = MeanLoss(params, dataset.train, table);

  // Shuffling uses its own stream so it never aliases the init draws.
  SplitMix shuffle_rng(config.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  double best_f1 = -1.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.Below(i)]);
    }
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      GraphBatch batch;
      std::vector<std::size_t> gold;
      for (std::size_t k = begin; k < end; ++k) {
        batch.Add(train[order[k]].adjacency, train[order[k]].h0);
        gold.push_back(train[order[k]].gold);
      }
      Gradients g = ComputeBatchGradients(params, batch, gold);
      if (!std::isfinite(g.loss)) {
        throw TrainingError("non-finite loss at epoch " +
                            std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
      }
      AdamStep(params.w0, g.w0, s0, config.adam);
      AdamStep(params.w1, g.w1, s1, config.adam);
      AdamStep(params.wfc, g.wfc, sfc, config.adam);
      params.wfc = ClampNonnegative(params.wfc);
      loss_sum += g.loss * static_cast<double>(end - begin);
      result.steps.push_back(
          {epoch, batch_index, g.loss, params.wfc.MinCoeff()});
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(order.size());
    if (!dev_gold.empty()) {
      const auto predicted = PredictAll(params, dataset.dev, table);
      record.dev_weighted_f1 = WeightedF1(dev_gold, predicted);
    }
    result.epochs.push_back(record);

    if (dev_gold.empty() || record.dev_weighted_f1 > best_f1) {
      best_f1 = record.dev_weighted_f1;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

}  // namespace lrv
