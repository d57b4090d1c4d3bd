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

// Edge-deletion perturbation: rank each sentence's edges by relevance summed
// over both adjacency crossings, delete a growing fraction from the head
// (most relevant first) or the tail (least relevant first), rebuild Ã from
// the survivors and re-score the split.

#ifndef LRV_EXPERIMENTS_H_
#define LRV_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lrv/corpus.h"
#include "lrv/format.h"
#include "lrv/metrics.h"
#include "lrv/model.h"
#include "lrv/relevance.h"

namespace lrv {

enum class DeletionOrder { kMostRelevantFirst, kLeastRelevantFirst };

struct RankedEdge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double score = 0.0;  // sum of edge relevance over both crossings

  friend bool operator==(const RankedEdge&, const RankedEdge&) = default;
};

// Descending by score, ties broken by ascending (i, j).
using EdgeRanking = std::vector<RankedEdge>;

// Throws std::invalid_argument when the trace was not computed on `graph`.
EdgeRanking RankEdges(const RelevanceTrace& trace, const SentenceGraph& graph);

// ceil(fraction * num_edges), robust to representation error in fraction.
std::size_t DeletionCount(double fraction, std::size_t num_edges);

// Edges left after deleting DeletionCount(fraction, |ranking|) edges from
// the head or tail of `ranking`.
std::vector<std::pair<std::size_t, std::size_t>> SurvivingEdges(
    const EdgeRanking& ranking, double fraction, DeletionOrder order);

struct CurvePoint {
  double fraction = 0.0;
  double weighted_f1 = 0.0;
};

struct PerturbationCurve {
  DeletionOrder order = DeletionOrder::kMostRelevantFirst;
  std::vector<CurvePoint> points;

  // Mean weighted F1 over the points with fraction > 0.
  double MeanPerturbedF1() const;
  // Trapezoidal area under the curve over the sampled fractions.
  double Area() const;
};

// 0.0, 0.1, ..., 0.9.
std::vector<double> DefaultFractions();

// Rankings for `graphs`, one explanation per sentence.
std::vector<EdgeRanking> RankAll(const ModelParams& params,
                                 const std::vector<SentenceGraph>& graphs,
                                 const EmbeddingTable& table);

PerturbationCurve PerturbEval(const ModelParams& params,
                              const std::vector<SentenceGraph>& graphs,
                              const EmbeddingTable& table,
                              const std::vector<double>& fractions,
                              DeletionOrder order);

// Same as PerturbEval with precomputed rankings.
PerturbationCurve PerturbEvalRanked(const ModelParams& params,
                                    const std::vector<SentenceGraph>& graphs,
                                    const EmbeddingTable& table,
                                    const std::vector<EdgeRanking>& rankings,
                                    const std::vector<double>& fractions,
                                    DeletionOrder order);

struct PerturbationResult {
  double baseline_f1 = 0.0;
  PerturbationCurve most;
  PerturbationCurve least;

  // mean(least) - mean(most) over fractions > 0; positive when deleting
  // relevant edges hurts more.
  double MeanGap() const {
    return least.MeanPerturbedF1() - most.MeanPerturbedF1();
  }
  double AreaGap() const { return least.Area() - most.Area(); }
};

// Both orderings over shared rankings.
PerturbationResult RunPerturbation(const ModelParams& params,
                                   const std::vector<SentenceGraph>& graphs,
                                   const EmbeddingTable& table,
                                   const std::vector<double>& fractions);

// "fraction,f1_most,f1_least" header then one row per fraction, 6 decimals.
std::string CurvesToCsv(const PerturbationCurve& most,
                        const PerturbationCurve& least);

struct CurveRow {
  double fraction = 0.0;
  double f1_most = 0.0;
  double f1_least = 0.0;
};

// Throws ParseError on a bad header or row.
std::vector<CurveRow> ParseCurvesCsv(const std::string& text);

void WriteCurvesCsv(const std::filesystem::path& path,
                    const PerturbationCurve& most,
                    const PerturbationCurve& least);

// Human-readable summary: baseline, per-fraction table, gaps.
std::string PerturbationReport(const PerturbationResult& result,
                               std::uint64_t seed, std::size_t num_graphs);

}  // namespace lrv

#endif  // LRV_EXPERIMENTS_H_
