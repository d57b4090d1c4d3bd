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

// Layerwise relevance propagation through the GCN classifier.
//
// Each GCN layer is treated as two fully connected sublayers: the feature
// projection (weights W) and the adjacency projection (weights Ã). Relevance
// starts at the largest logit and is pushed back with the z+ rule through
// Wfc, winner-take-all through the max-pool, through both adjacency
// projections and through W1; the input projection W0 uses the z^B rule
// because word vectors have negative coefficients.
//
// Three contribution maps are kept, named after the figure row they feed:
//
//   "output"  M2 (n x f2)  relevance on H2, right after the max-pool
//   "gcn2"    M1 (n x f1)  relevance on H1, after the layer-2 projection
//   "gcn1"    M0 (n x d)   relevance on H0, after the input projection
//
// Edge relevance is captured while crossing the layer-2 adjacency (stored
// on "gcn2") and the layer-1 adjacency (stored on "gcn1").

#ifndef LRV_RELEVANCE_H_
#define LRV_RELEVANCE_H_

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrv/corpus.h"
#include "lrv/linalg.h"
#include "lrv/model.h"

namespace lrv {

inline constexpr double kLrpEpsilon = 1e-9;

// A propagation rule was applied outside its domain (negative input to the
// z+ rule, input outside the z^B box, negative adjacency weight).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Undirected edge (i < j) -> relevance carried across it.
using EdgeRelevance = std::map<std::pair<std::size_t, std::size_t>, double>;

// z+ rule, applied independently to every row:
//   R_in[r][i] = sum_j x[r][i] w+[i][j] / (sum_k x[r][k] w+[k][j] + eps) R[r][j]
// Output neurons whose positive pre-activation is exactly 0 distribute
// nothing.
DenseMatrix LrpLinearZPlus(const DenseMatrix& inputs,
                           const DenseMatrix& weights,
                           const DenseMatrix& output_relevance,
                           double epsilon = kLrpEpsilon);

struct AdjacencyRelevance {
  DenseMatrix input_relevance;     // n x f
  EdgeRelevance edges;             // every graph edge, including zero ones
  std::vector<double> self_loops;  // length n
};

// z+ rule through the adjacency sublayer out[j] = sum_i Ã[j][i] in[i], run
// per channel. The message j -> i is attributed to the undirected edge
// {i, j}, or to node i's self loop when i == j.
AdjacencyRelevance LrpAdjacency(const NormalizedAdjacency& adjacency,
                                const DenseMatrix& inputs,
                                const DenseMatrix& output_relevance,
                                double epsilon = kLrpEpsilon);

// z^B rule for real-valued inputs confined to [low_i, high_i]:
//   z_ij = x_i w_ij - low_i w+_ij - high_i w-_ij
//   R_in[r][i] = sum_j z_ij / (sum_k z_kj + eps) R[r][j]
DenseMatrix LrpInputZB(const DenseMatrix& inputs, const DenseMatrix& weights,
                       const DenseMatrix& output_relevance,
                       std::span<const double> low,
                       std::span<const double> high,
                       double epsilon = kLrpEpsilon);

struct OutputRelevance {
  std::size_t chosen_class = 0;
  double output_relevance = 0.0;  // start_scale * logits[chosen_class]
  DenseMatrix pooled_relevance;   // 1 x f2
  bool degenerate = false;        // the largest logit is 0
};

// Starts at the largest logit (before softmax, ties to the lowest class)
// and pushes it through Wfc.
OutputRelevance LrpOutputLayer(const ActivationCache& cache,
                               const ModelParams& params,
                               double start_scale = 1.0,
                               double epsilon = kLrpEpsilon);

// Routes each channel's relevance to the row that won the max-pool.
DenseMatrix LrpMaxPool(const DenseMatrix& pooled_relevance,
                       std::span<const std::size_t> pool_argmax,
                       std::size_t num_nodes);

struct LayerRelevance {
  std::string tag;                   // "output", "gcn2" or "gcn1"
  DenseMatrix map;                   // contribution map at this checkpoint
  std::vector<double> nodes;         // row sums of `map`
  bool has_edges = false;            // false for "output"
  EdgeRelevance edges;               // adjacency crossing into this layer
  std::vector<double> self_loops;
  double residual = 0.0;             // |sum(nodes) - output_relevance|
  double edge_residual = 0.0;        // |sum(edges) + sum(self) - output_relevance|
};

struct RelevanceTrace {
  std::size_t chosen_class = 0;
  double output_relevance = 0.0;
  bool degenerate = false;
  std::array<LayerRelevance, 3> layers;  // output, gcn2, gcn1

  std::size_t num_nodes() const { return layers[0].nodes.size(); }
  const LayerRelevance& layer(std::string_view tag) const;
};

struct ExplainOptions {
  double start_scale = 1.0;
  double epsilon = kLrpEpsilon;
};

inline constexpr std::array<const char*, 3> kLayerTags = {"output", "gcn2",
                                                          "gcn1"};

// Forward pass with caching followed by the full backward relevance pass.
// `low` and `high` are the per-dimension input bounds.
RelevanceTrace Explain(const ModelParams& params,
                       const NormalizedAdjacency& adjacency,
                       const DenseMatrix& h0, std::span<const double> low,
                       std::span<const double> high,
                       const ExplainOptions& options = {});

RelevanceTrace Explain(const ModelParams& params, const SentenceGraph& graph,
                       const EmbeddingTable& table,
                       const ExplainOptions& options = {});

// True if every checkpoint and both edge accountings are within
// rel_tol * output_relevance + abs_tol of the output relevance.
bool ConservationHolds(const RelevanceTrace& trace, double rel_tol = 1e-6,
                       double abs_tol = 1e-12);

// Largest residual divided by the output relevance (0 for degenerate traces).
double MaxRelativeResidual(const RelevanceTrace& trace);

}  // namespace lrv

#endif  // LRV_RELEVANCE_H_
