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

#include "lrv/run_config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lrv {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T ParseValue(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) {
      throw ConfigError("config key '" + key + "' must be finite");
    }
  }
  return out;
}

std::filesystem::path ResolvePath(const std::string& value,
                                  const std::filesystem::path& base) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

// Shortest text that reads back to the same double.
std::string Exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value,
                    const std::filesystem::path& base) {
  if (key == "manifest") {
    manifest = ResolvePath(value, base);
  } else if (key == "embeddings") {
    embeddings = ResolvePath(value, base);
  } else if (key == "out") {
    out_dir = ResolvePath(value, base);
  } else if (key == "checkpoint") {
    checkpoint = ResolvePath(value, base);
  } else if (key == "hidden1") {
    train.hidden1 = ParseValue<std::size_t>(key, value);
  } else if (key == "hidden2") {
    train.hidden2 = ParseValue<std::size_t>(key, value);
  } else if (key == "batch") {
    train.batch_size = ParseValue<std::size_t>(key, value);
  } else if (key == "epochs") {
    train.epochs = ParseValue<std::size_t>(key, value);
  } else if (key == "seed") {
    train.seed = ParseValue<std::uint64_t>(key, value);
  } else if (key == "lr") {
    train.adam.learning_rate = ParseValue<double>(key, value);
  } else if (key == "beta1") {
    train.adam.beta1 = ParseValue<double>(key, value);
  } else if (key == "beta2") {
    train.adam.beta2 = ParseValue<double>(key, value);
  } else if (key == "adam_epsilon") {
    train.adam.epsilon = ParseValue<double>(key, value);
  } else if (key == "conservation_rel_tol") {
    conservation_rel_tol = ParseValue<double>(key, value);
  } else if (key == "conservation_abs_tol") {
    conservation_abs_tol = ParseValue<double>(key, value);
  } else if (key == "width_base") {
    style.width_base = ParseValue<double>(key, value);
  } else if (key == "width_scale") {
    style.width_scale = ParseValue<double>(key, value);
  } else if (key == "width_max") {
    style.width_max = ParseValue<double>(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::filesystem::path RunConfig::CheckpointPath() const {
  return checkpoint.empty() ? out_dir / "model.ckpt" : checkpoint;
}

void RunConfig::Validate() const {
  if (train.hidden1 == 0 || train.hidden2 == 0) {
    throw ConfigError("hidden sizes must be positive");
  }
  if (train.batch_size == 0) throw ConfigError("batch must be positive");
  if (train.adam.learning_rate < 0.0) throw ConfigError("lr must be >= 0");
  if (!(train.adam.beta1 >= 0.0 && train.adam.beta1 < 1.0) ||
      !(train.adam.beta2 >= 0.0 && train.adam.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(train.adam.epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
  if (conservation_rel_tol < 0.0 || conservation_abs_tol < 0.0) {
    throw ConfigError("conservation tolerances must be >= 0");
  }
  if (!(style.width_base > 0.0) || style.width_max < style.width_base ||
      style.width_scale < 0.0) {
    throw ConfigError("need 0 < width_base <= width_max and width_scale >= 0");
  }
  if (out_dir.empty()) throw ConfigError("out must not be empty");
}

std::string RunConfig::Describe() const {
  std::ostringstream out;
  out << "manifest = " << manifest.string() << "\n"
      << "embeddings = " << embeddings.string() << "\n"
      << "out = " << out_dir.string() << "\n"
      << "checkpoint = " << CheckpointPath().string() << "\n"
      << "hidden1 = " << train.hidden1 << "\n"
      << "hidden2 = " << train.hidden2 << "\n"
      << "batch = " << train.batch_size << "\n"
      << "epochs = " << train.epochs << "\n"
      << "seed = " << train.seed << "\n"
      << "lr = " << Exact(train.adam.learning_rate) << "\n"
      << "beta1 = " << Exact(train.adam.beta1) << "\n"
      << "beta2 = " << Exact(train.adam.beta2) << "\n"
      << "adam_epsilon = " << Exact(train.adam.epsilon) << "\n"
      << "conservation_rel_tol = " << Exact(conservation_rel_tol) << "\n"
      << "conservation_abs_tol = " << Exact(conservation_abs_tol) << "\n"
      << "width_base = " << Exact(style.width_base) << "\n"
      << "width_scale = " << Exact(style.width_scale) << "\n"
      << "width_max = " << Exact(style.width_max) << "\n";
  return out.str();
}

RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base) {
  RunConfig config;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string line = Trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    config.Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), base);
  }
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return ParseRunConfig(in, path.parent_path());
}

}  // namespace lrv
