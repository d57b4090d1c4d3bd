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

#include "lrv/metrics.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lrv {

ClassificationReport Classify(std::span<const std::size_t> gold,
                              std::span<const std::size_t> predicted,
                              std::size_t num_classes) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument("Classify: " + std::to_string(gold.size()) +
                                " gold labels but " +
                                std::to_string(predicted.size()) +
                                " predictions");
  }
  if (gold.empty()) throw std::invalid_argument("Classify: empty input");
  for (std::size_t i = 0; i < gold.size(); ++i) {
    num_classes = std::max({num_classes, gold[i] + 1, predicted[i] + 1});
  }

  std::vector<std::size_t> true_pos(num_classes, 0);
  std::vector<std::size_t> pred_count(num_classes, 0);
  ClassificationReport report;
  report.per_class.resize(num_classes);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    report.per_class[gold[i]].support += 1;
    pred_count[predicted[i]] += 1;
    if (gold[i] == predicted[i]) {
      true_pos[gold[i]] += 1;
      ++correct;
    }
  }

  const double total = static_cast<double>(gold.size());
  for (std::size_t c = 0; c < num_classes; ++c) {
    ClassScores& s = report.per_class[c];
    const double tp = static_cast<double>(true_pos[c]);
    s.precision = pred_count[c] ? tp / static_cast<double>(pred_count[c]) : 0.0;
    s.recall = s.support ? tp / static_cast<double>(s.support) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    report.weighted_f1 += s.f1 * static_cast<double>(s.support) / total;
  }
  report.accuracy = static_cast<double>(correct) / total;
  return report;
}

double WeightedF1(std::span<const std::size_t> gold,
                  std::span<const std::size_t> predicted) {
  return Classify(gold, predicted, 0).weighted_f1;
}

}  // namespace lrv
