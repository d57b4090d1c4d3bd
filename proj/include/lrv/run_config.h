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

#ifndef LRV_RUN_CONFIG_H_
#define LRV_RUN_CONFIG_H_

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include "lrv/model.h"
#include "lrv/render.h"

namespace lrv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a CLI run needs. Loaded from `key = value` text; see
// configs/fixture.conf for the recognized keys.
struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path embeddings;
  std::filesystem::path out_dir = "out";
  std::filesystem::path checkpoint;  // empty: <out_dir>/model.ckpt
  TrainConfig train;
  double conservation_rel_tol = 1e-6;
  double conservation_abs_tol = 1e-12;
  RenderStyle style;

  // Relative paths in `value` resolve against `base`.
  void Set(const std::string& key, const std::string& value,
           const std::filesystem::path& base = {});

  std::filesystem::path CheckpointPath() const;

  // Throws ConfigError for non-positive dimensions and similar.
  void Validate() const;

  // Canonical `key = value` listing, one per line.
  std::string Describe() const;
};

RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base);
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace lrv

#endif  // LRV_RUN_CONFIG_H_
