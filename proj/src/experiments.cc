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

#include "lrv/experiments.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lrv {

EdgeRanking RankEdges(const RelevanceTrace& trace, const SentenceGraph& graph) {
  if (trace.num_nodes() != graph.num_nodes()) {
    throw std::invalid_argument("RankEdges: trace has " +
                                std::to_string(trace.num_nodes()) +
                                " nodes, sentence '" + graph.id + "' has " +
                                std::to_string(graph.num_nodes()));
  }
  const auto pairs = graph.UndirectedEdges();
  for (const auto& layer : trace.layers) {
    for (const auto& [edge, value] : layer.edges) {
      if (!std::binary_search(pairs.begin(), pairs.end(), edge)) {
        throw std::invalid_argument(
            "RankEdges: trace edge (" + std::to_string(edge.first) + ", " +
            std::to_string(edge.second) + ") is not in sentence '" + graph.id +
            "'");
      }
    }
  }
  EdgeRanking ranking;
  ranking.reserve(pairs.size());
  for (const auto& edge : pairs) {
    double score = 0.0;
    for (const auto& layer : trace.layers) {
      if (auto it = layer.edges.find(edge); it != layer.edges.end()) {
        score += it->second;
      }
    }
    ranking.push_back({edge.first, edge.second, score});
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const RankedEdge& a, const RankedEdge& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return std::pair(a.i, a.j) < std::pair(b.i, b.j);
                   });
  return ranking;
}

std::size_t DeletionCount(double fraction, std::size_t num_edges) {
  if (fraction <= 0.0 || num_edges == 0) return 0;
  const double raw = fraction * static_cast<double>(num_edges);
  // 0.3 * 10 evaluates to 3.0000000000000004; do not round that up to 4.
  const auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::min(count, num_edges);
}

std::vector<std::pair<std::size_t, std::size_t>> SurvivingEdges(
    const EdgeRanking& ranking, double fraction, DeletionOrder order) {
  const std::size_t drop = DeletionCount(fraction, ranking.size());
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  const std::size_t begin =
      order == DeletionOrder::kMostRelevantFirst ? drop : 0;
  const std::size_t end = order == DeletionOrder::kMostRelevantFirst
                              ? ranking.size()
                              : ranking.size() - drop;
  for (std::size_t k = begin; k < end; ++k) {
    kept.emplace_back(ranking[k].i, ranking[k].j);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

double PerturbationCurve::MeanPerturbedF1() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : points) {
    if (p.fraction > 0.0) {
      sum += p.weighted_f1;
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double PerturbationCurve::Area() const {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += 0.5 * (points[k].weighted_f1 + points[k - 1].weighted_f1) *
            (points[k].fraction - points[k - 1].fraction);
  }
  return area;
}

std::vector<double> DefaultFractions() {
  std::vector<double> f;
  for (int k = 0; k < 10; ++k) f.push_back(k / 10.0);
  return f;
}

std::vector<EdgeRanking> RankAll(const ModelParams& params,
                                 const std::vector<SentenceGraph>& graphs,
                                 const EmbeddingTable& table) {
  std::vector<EdgeRanking> rankings;
  rankings.reserve(graphs.size());
  for (const auto& g : graphs) {
    rankings.push_back(RankEdges(Explain(params, g, table), g));
  }
  return rankings;
}

PerturbationCurve PerturbEvalRanked(const ModelParams& params,
                                    const std::vector<SentenceGraph>& graphs,
                                    const EmbeddingTable& table,
                                    const std::vector<EdgeRanking>& rankings,
                                    const std::vector<double>& fractions,
                                    DeletionOrder order) {
  if (graphs.empty()) throw std::invalid_argument("PerturbEval: no sentences");
  if (rankings.size() != graphs.size()) {
    throw std::invalid_argument("PerturbEval: ranking count mismatch");
  }
  std::vector<std::size_t> gold;
  std::vector<DenseMatrix> features;
  for (const auto& g : graphs) {
    gold.push_back(LabelIndex(g.gold));
    features.push_back(EmbedSentence(g, table));
  }

  PerturbationCurve curve;
  curve.order = order;
  for (double fraction : fractions) {
    std::vector<std::size_t> predicted;
    predicted.reserve(graphs.size());
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      const auto adjacency = NormalizedAdjacency::FromEdges(
          graphs[k].num_nodes(), SurvivingEdges(rankings[k], fraction, order));
      predicted.push_back(Predict(params, adjacency, features[k]));
    }
    curve.points.push_back({fraction, WeightedF1(gold, predicted)});
  }
  return curve;
}

PerturbationCurve PerturbEval(const ModelParams& params,
                              const std::vector<SentenceGraph>& graphs,
                              const EmbeddingTable& table,
                              const std::vector<double>& fractions,
                              DeletionOrder order) {
  return PerturbEvalRanked(params, graphs, table,
                           RankAll(params, graphs, table), fractions, order);
}

PerturbationResult RunPerturbation(const ModelParams& params,
                                   const std::vector<SentenceGraph>& graphs,
                                   const EmbeddingTable& table,
                                   const std::vector<double>& fractions) {
  const auto rankings = RankAll(params, graphs, table);
  PerturbationResult result;
  result.most = PerturbEvalRanked(params, graphs, table, rankings, fractions,
                                  DeletionOrder::kMostRelevantFirst);
  result.least = PerturbEvalRanked(params, graphs, table, rankings, fractions,
                                   DeletionOrder::kLeastRelevantFirst);
  std::vector<std::size_t> gold;
  for (const auto& g : graphs) gold.push_back(LabelIndex(g.gold));
  result.baseline_f1 = WeightedF1(gold, PredictAll(params, graphs, table));
  return result;
}

std::string CurvesToCsv(const PerturbationCurve& most,
                        const PerturbationCurve& least) {
  if (most.points.size() != least.points.size()) {
    throw std::invalid_argument("CurvesToCsv: curves have different lengths");
  }
  std::string out = "fraction,f1_most,f1_least\n";
  for (std::size_t k = 0; k < most.points.size(); ++k) {
    if (most.points[k].fraction != least.points[k].fraction) {
      throw std::invalid_argument("CurvesToCsv: fractions differ at row " +
                                  std::to_string(k));
    }
    out += FormatFixed(most.points[k].fraction, 6) + "," +
           FormatFixed(most.points[k].weighted_f1, 6) + "," +
           FormatFixed(least.points[k].weighted_f1, 6) + "\n";
  }
  return out;
}

std::vector<CurveRow> ParseCurvesCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "fraction,f1_most,f1_least") {
    throw ParseError("curve CSV: unexpected header", 1);
  }
  std::vector<CurveRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    CurveRow row;
    double* targets[] = {&row.fraction, &row.f1_most, &row.f1_least};
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
      const std::size_t comma = k < 2 ? line.find(',', start) : line.size();
      if (comma == std::string::npos) {
        throw ParseError("curve CSV: expected 3 columns", line_no);
      }
      auto [ptr, ec] = std::from_chars(line.data() + start,
                                       line.data() + comma, *targets[k]);
      if (ec != std::errc() || ptr != line.data() + comma) {
        throw ParseError("curve CSV: bad number", line_no);
      }
      start = comma + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

void WriteCurvesCsv(const std::filesystem::path& path,
                    const PerturbationCurve& most,
                    const PerturbationCurve& least) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << CurvesToCsv(most, least);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string PerturbationReport(const PerturbationResult& result,
                               std::uint64_t seed, std::size_t num_graphs) {
  std::ostringstream out;
  out << "# edge-deletion perturbation\n";
  out << "seed: " << seed << "\n";
  out << "sentences: " << num_graphs << "\n";
  out << "baseline weighted F1: " << FormatFixed(result.baseline_f1, 6) << "\n\n";
  out << "fraction  most-first  least-first\n";
  for (std::size_t k = 0; k < result.most.points.size(); ++k) {
    out << FormatFixed(result.most.points[k].fraction, 2) << "      "
        << FormatFixed(result.most.points[k].weighted_f1, 6) << "    "
        << FormatFixed(result.least.points[k].weighted_f1, 6) << "\n";
  }
  out << "\nmean F1 over deleted fractions: most-first "
      << FormatFixed(result.most.MeanPerturbedF1(), 6) << ", least-first "
      << FormatFixed(result.least.MeanPerturbedF1(), 6) << "\n";
  out << "mean gap (least - most): " << FormatFixed(result.MeanGap(), 6)
      << "\n";
  out << "AUC: most-first " << FormatFixed(result.most.Area(), 6)
      << ", least-first " << FormatFixed(result.least.Area(), 6)
      << ", gap " << FormatFixed(result.AreaGap(), 6) << "\n";
  return out.str();
}

}  // namespace lrv
