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

#ifndef LRV_METRICS_H_
#define LRV_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace lrv {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct ClassificationReport {
  std::vector<ClassScores> per_class;  // indexed by class
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
};

// Per-class F1 averaged with gold-support weights. Classes that never occur
// in `gold` have weight 0. Throws std::invalid_argument for empty or
// length-mismatched inputs.
ClassificationReport Classify(std::span<const std::size_t> gold,
                              std::span<const std::size_t> predicted,
                              std::size_t num_classes);

double WeightedF1(std::span<const std::size_t> gold,
                  std::span<const std::size_t> predicted);

}  // namespace lrv

#endif  // LRV_METRICS_H_
