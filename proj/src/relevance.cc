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

#include "lrv/relevance.h"

#include <algorithm>
#include <cmath>

namespace lrv {
namespace {

void RequireNonnegative(const DenseMatrix& m, const char* what) {
  if (m.MinCoeff() < 0.0) {
    throw ContractViolation(std::string(what) +
                            ": z+ rule needs nonnegative inputs");
  }
}

double Sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double Sum(const EdgeRelevance& edges) {
  double s = 0.0;
  for (const auto& [edge, value] : edges) s += value;
  return s;
}

}  // namespace

DenseMatrix LrpLinearZPlus(const DenseMatrix& inputs,
                           const DenseMatrix& weights,
                           const DenseMatrix& output_relevance,
                           double epsilon) {
  if (inputs.cols() != weights.rows() ||
      output_relevance.rows() != inputs.rows() ||
      output_relevance.cols() != weights.cols()) {
    throw DimensionError("LrpLinearZPlus: inputs " + inputs.ShapeString() +
                         ", weights " + weights.ShapeString() +
                         ", relevance " + output_relevance.ShapeString());
  }
  RequireNonnegative(inputs, "LrpLinearZPlus");
  const DenseMatrix positive = Relu(weights);
  DenseMatrix out(inputs.rows(), inputs.cols());
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      const double rel = output_relevance(r, j);
      double z = 0.0;
      for (std::size_t i = 0; i < inputs.cols(); ++i) {
        z += inputs(r, i) * positive(i, j);
      }
      if (z == 0.0 || rel == 0.0) continue;
      const double denom = z + epsilon;
      for (std::size_t i = 0; i < inputs.cols(); ++i) {
        out(r, i) += inputs(r, i) * positive(i, j) / denom * rel;
      }
    }
  }
  return out;
}

AdjacencyRelevance LrpAdjacency(const NormalizedAdjacency& adjacency,
                                const DenseMatrix& inputs,
                                const DenseMatrix& output_relevance,
                                double epsilon) {
  const DenseMatrix& a = adjacency.matrix();
  const std::size_t n = a.rows();
  if (inputs.rows() != n || output_relevance.rows() != n ||
      output_relevance.cols() != inputs.cols()) {
    throw DimensionError("LrpAdjacency: adjacency " + a.ShapeString() +
                         ", inputs " + inputs.ShapeString() + ", relevance " +
                         output_relevance.ShapeString());
  }
  RequireNonnegative(inputs, "LrpAdjacency");
  if (a.MinCoeff() < 0.0) {
    throw ContractViolation("LrpAdjacency: negative adjacency weight");
  }

  AdjacencyRelevance out;
  out.input_relevance = DenseMatrix(n, inputs.cols());
  out.self_loops.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a(i, j) > 0.0) out.edges[{i, j}] = 0.0;
    }
  }

  for (std::size_t c = 0; c < inputs.cols(); ++c) {
    for (std::size_t j = 0; j < n; ++j) {
      const double rel = output_relevance(j, c);
      if (rel == 0.0) continue;
      double z = 0.0;
      for (std::size_t k = 0; k < n; ++k) z += a(j, k) * inputs(k, c);
      if (z == 0.0) continue;
      const double denom = z + epsilon;
      for (std::size_t i = 0; i < n; ++i) {
        const double contribution = a(j, i) * inputs(i, c);
        if (contribution == 0.0) continue;
        const double message = contribution / denom * rel;
        out.input_relevance(i, c) += message;
        if (i == j) {
          out.self_loops[i] += message;
        } else {
          out.edges[{std::min(i, j), std::max(i, j)}] += message;
        }
      }
    }
  }
  return out;
}

DenseMatrix LrpInputZB(const DenseMatrix& inputs, const DenseMatrix& weights,
                       const DenseMatrix& output_relevance,
                       std::span<const double> low,
                       std::span<const double> high, double epsilon) {
  const std::size_t d = inputs.cols();
  if (weights.rows() != d || output_relevance.rows() != inputs.rows() ||
      output_relevance.cols() != weights.cols() || low.size() != d ||
      high.size() != d) {
    throw DimensionError("LrpInputZB: inputs " + inputs.ShapeString() +
                         ", weights " + weights.ShapeString() +
                         ", relevance " + output_relevance.ShapeString() +
                         ", bounds " + std::to_string(low.size()) + "/" +
                         std::to_string(high.size()));
  }
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      if (inputs(r, i) < low[i] || inputs(r, i) > high[i]) {
        throw ContractViolation("LrpInputZB: input (" + std::to_string(r) +
                                ", " + std::to_string(i) +
                                ") lies outside its bounds");
      }
    }
  }

  DenseMatrix out(inputs.rows(), d);
  std::vector<double> terms(d);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      const double rel = output_relevance(r, j);
      if (rel == 0.0) continue;
      double z = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double w = weights(i, j);
        const double w_pos = w > 0.0 ? w : 0.0;
        const double w_neg = w < 0.0 ? w : 0.0;
        terms[i] = inputs(r, i) * w - low[i] * w_pos - high[i] * w_neg;
        z += terms[i];
      }
      if (z == 0.0) continue;
      const double denom = z + (z >= 0.0 ? epsilon : -epsilon);
      for (std::size_t i = 0; i < d; ++i) {
        out(r, i) += terms[i] / denom * rel;
      }
    }
  }
  return out;
}

OutputRelevance LrpOutputLayer(const ActivationCache& cache,
                               const ModelParams& params, double start_scale,
                               double epsilon) {
  OutputRelevance out;
  out.chosen_class = ArgmaxClass(cache.logits);
  const double top = cache.logits(0, out.chosen_class);
  out.output_relevance = start_scale * top;
  out.degenerate = !(top > 0.0);
  if (out.degenerate) {
    out.output_relevance = 0.0;
    out.pooled_relevance = DenseMatrix(1, cache.pooled.cols());
    return out;
  }
  DenseMatrix start(1, cache.logits.cols());
  start(0, out.chosen_class) = out.output_relevance;
  out.pooled_relevance =
      LrpLinearZPlus(cache.pooled, params.wfc, start, epsilon);
  return out;
}

DenseMatrix LrpMaxPool(const DenseMatrix& pooled_relevance,
                       std::span<const std::size_t> pool_argmax,
                       std::size_t num_nodes) {
  if (pooled_relevance.rows() != 1 ||
      pooled_relevance.cols() != pool_argmax.size()) {
    throw DimensionError("LrpMaxPool: relevance " +
                         pooled_relevance.ShapeString() + " for " +
                         std::to_string(pool_argmax.size()) + " channels");
  }
  DenseMatrix out(num_nodes, pool_argmax.size());
  for (std::size_t c = 0; c < pool_argmax.size(); ++c) {
    if (pool_argmax[c] >= num_nodes) {
      throw DimensionError("LrpMaxPool: winner row " +
                           std::to_string(pool_argmax[c]) + " outside " +
                           std::to_string(num_nodes) + " nodes");
    }
    out(pool_argmax[c], c) = pooled_relevance(0, c);
  }
  return out;
}

const LayerRelevance& RelevanceTrace::layer(std::string_view tag) const {
  for (const auto& l : layers) {
    if (l.tag == tag) return l;
  }
  throw std::out_of_range("no relevance layer '" + std::string(tag) + "'");
}

RelevanceTrace Explain(const ModelParams& params,
                       const NormalizedAdjacency& adjacency,
                       const DenseMatrix& h0, std::span<const double> low,
                       std::span<const double> high,
                       const ExplainOptions& options) {
  const ActivationCache cache = Forward(params, adjacency, h0);
  const double eps = options.epsilon;
  const std::size_t n = h0.rows();

  const OutputRelevance top =
      LrpOutputLayer(cache, params, options.start_scale, eps);

  RelevanceTrace trace;
  trace.chosen_class = top.chosen_class;
  trace.output_relevance = top.output_relevance;
  trace.degenerate = top.degenerate;

  // Pool -> H2.
  DenseMatrix m2 = LrpMaxPool(top.pooled_relevance, cache.pool_argmax, n);
  // H2 = Ã Z1, relevance lands on Z1; ReLU passes it through to H1 W1.
  AdjacencyRelevance crossing2 = LrpAdjacency(adjacency, cache.z1, m2, eps);
  DenseMatrix m1 =
      LrpLinearZPlus(cache.h1, params.w1, crossing2.input_relevance, eps);
  // H1 = Ã Z0.
  AdjacencyRelevance crossing1 = LrpAdjacency(adjacency, cache.z0, m1, eps);
  DenseMatrix m0 = LrpInputZB(h0, params.w0, crossing1.input_relevance, low,
                              high, eps);

  trace.layers[0].map = std::move(m2);
  trace.layers[1].map = std::move(m1);
  trace.layers[1].has_edges = true;
  trace.layers[1].edges = std::move(crossing2.edges);
  trace.layers[1].self_loops = std::move(crossing2.self_loops);
  trace.layers[2].map = std::move(m0);
  trace.layers[2].has_edges = true;
  trace.layers[2].edges = std::move(crossing1.edges);
  trace.layers[2].self_loops = std::move(crossing1.self_loops);

  for (std::size_t l = 0; l < trace.layers.size(); ++l) {
    LayerRelevance& layer = trace.layers[l];
    layer.tag = kLayerTags[l];
    layer.nodes = layer.map.RowSums();
    layer.residual = std::abs(Sum(layer.nodes) - trace.output_relevance);
    if (layer.has_edges) {
      layer.edge_residual = std::abs(Sum(layer.edges) + Sum(layer.self_loops) -
                                     trace.output_relevance);
    }
  }
  return trace;
}

RelevanceTrace Explain(const ModelParams& params, const SentenceGraph& graph,
                       const EmbeddingTable& table,
                       const ExplainOptions& options) {
  CheckCompatible(params, table);
  return Explain(params, BuildAdjacency(graph), EmbedSentence(graph, table),
                 table.low(), table.high(), options);
}

bool ConservationHolds(const RelevanceTrace& trace, double rel_tol,
                       double abs_tol) {
  const double bound = rel_tol * std::abs(trace.output_relevance) + abs_tol;
  for (const auto& layer : trace.layers) {
    if (!(layer.residual <= bound)) return false;
    if (layer.has_edges && !(layer.edge_residual <= bound)) return false;
  }
  return true;
}

double MaxRelativeResidual(const RelevanceTrace& trace) {
  if (trace.output_relevance == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& layer : trace.layers) {
    worst = std::max({worst, layer.residual, layer.edge_residual});
  }
  return worst / std::abs(trace.output_relevance);
}

}  // namespace lrv
