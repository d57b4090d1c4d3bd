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

// GCN sentence classifier with the ReLU applied right after each feature
// projection:
//
//   Z0 = relu(H0 W0)    H1 = Ã Z0
//   Z1 = relu(H1 W1)    H2 = Ã Z1
//   pooled = column-max(H2)    logits = pooled Wfc
//
// No layer has a bias. Wfc is kept entrywise nonnegative, so all
// activations and logits are nonnegative.

#ifndef LRV_MODEL_H_
#define LRV_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrv/corpus.h"
#include "lrv/linalg.h"

namespace lrv {

struct ModelShape {
  std::size_t input_dim = 0;  // d
  std::size_t hidden1 = 96;   // f1
  std::size_t hidden2 = 96;   // f2
  std::size_t classes = kNumLabels;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct ModelParams {
  ModelShape shape;
  DenseMatrix w0;   // d x f1
  DenseMatrix w1;   // f1 x f2
  DenseMatrix wfc;  // f2 x C, entrywise >= 0

  // Throws DimensionError if a matrix disagrees with `shape`.
  void Validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Glorot-uniform W0 and W1 from a generator seeded with shape.seed. Wfc is
// drawn from the nonnegative half of the same range.
ModelParams InitParams(const ModelShape& shape);

struct ActivationCache {
  DenseMatrix h0;       // n x d
  DenseMatrix z0;       // n x f1, relu(H0 W0)
  DenseMatrix h1;       // n x f1, Ã Z0
  DenseMatrix z1;       // n x f2, relu(H1 W1)
  DenseMatrix h2;       // n x f2, Ã Z1
  DenseMatrix pooled;   // 1 x f2
  std::vector<std::size_t> pool_argmax;  // length f2
  DenseMatrix logits;   // 1 x C
};

ActivationCache Forward(const ModelParams& params,
                        const NormalizedAdjacency& adjacency,
                        const DenseMatrix& h0);

struct Gradients {
  double loss = 0.0;
  DenseMatrix w0;
  DenseMatrix w1;
  DenseMatrix wfc;
};

// Cross-entropy loss of one graph and its analytic parameter gradients.
Gradients ComputeGradients(const ModelParams& params,
                           const NormalizedAdjacency& adjacency,
                           const DenseMatrix& h0, std::size_t gold);

// Several graphs packed into one block-diagonal system. Member k owns rows
// [offsets[k], offsets[k + 1]) of the stacked features.
class GraphBatch {
 public:
  void Add(const NormalizedAdjacency& adjacency, const DenseMatrix& h0);

  std::size_t num_graphs() const { return blocks_.size(); }
  std::size_t num_rows() const { return offsets_.back(); }
  const DenseMatrix& features() const { return features_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

  // Block-diagonal Ã times `x` (x has num_rows() rows). Off-diagonal
  // blocks are structurally zero and skipped.
  DenseMatrix ApplyAdjacency(const DenseMatrix& x) const;

 private:
  std::vector<DenseMatrix> blocks_;
  std::vector<std::size_t> offsets_{0};
  DenseMatrix features_;
};

struct BatchActivations {
  DenseMatrix z0, h1, z1, h2;
  DenseMatrix pooled;  // num_graphs x f2
  std::vector<std::vector<std::size_t>> pool_argmax;  // per graph, rows local
  DenseMatrix logits;  // num_graphs x C
};

BatchActivations ForwardBatch(const ModelParams& params,
                              const GraphBatch& batch);

// Mean cross-entropy over the batch and its gradients.
Gradients ComputeBatchGradients(const ModelParams& params,
                                const GraphBatch& batch,
                                std::span<const std::size_t> gold);

// Argmax with ties to the lowest index.
std::size_t ArgmaxClass(const DenseMatrix& logits_row);

std::size_t Predict(const ModelParams& params,
                    const NormalizedAdjacency& adjacency,
                    const DenseMatrix& h0);
std::size_t Predict(const ModelParams& params, const SentenceGraph& graph,
                    const EmbeddingTable& table);

struct TrainConfig {
  std::size_t hidden1 = 96;
  std::size_t hidden2 = 96;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 7;
  AdamConfig adam;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_weighted_f1 = 0.0;
};

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double loss = 0.0;
  double wfc_min = 0.0;  // smallest Wfc entry after update and clamp
};

struct TrainResult {
  ModelParams params;  // from the best dev epoch
  ModelParams initial_params;
  std::size_t best_epoch = 0;
  double initial_train_loss = 0.0;
  std::vector<EpochRecord> epochs;
  std::vector<StepRecord> steps;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adam over shuffled mini-batches; Wfc is clamped to >= 0 after every step.
// Returns the parameters of the epoch with the best dev weighted F1 (the
// last epoch if the dev split is empty).
TrainResult Train(const LabeledDataset& dataset, const EmbeddingTable& table,
                  const TrainConfig& config);

// Mean cross-entropy over `graphs`.
double MeanLoss(const ModelParams& params,
                const std::vector<SentenceGraph>& graphs,
                const EmbeddingTable& table);

std::vector<std::size_t> PredictAll(const ModelParams& params,
                                    const std::vector<SentenceGraph>& graphs,
                                    const EmbeddingTable& table);

// Deterministic, platform-independent generator helpers.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed);
  std::uint64_t Next();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer in [0, bound).
  std::size_t Below(std::size_t bound);

 private:
  std::uint64_t state_;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary container: 8-byte magic, u32 version, u64 d, f1, f2, C, seed, then
// W0, W1, Wfc, each as u64 rows, u64 cols, u64 count and `count`
// little-endian float64 values in row-major order.
void WriteCheckpoint(std::ostream& out, const ModelParams& params);
ModelParams ReadCheckpoint(std::istream& in);
void SaveCheckpoint(const std::filesystem::path& path,
                    const ModelParams& params);
ModelParams LoadCheckpoint(const std::filesystem::path& path);

// Throws CheckpointError when the params cannot consume `table` vectors.
void CheckCompatible(const ModelParams& params, const EmbeddingTable& table);

}  // namespace lrv

#endif  // LRV_MODEL_H_
