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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lrv/model.h"

namespace lrv {
namespace {

constexpr std::array<char, 8> kMagic = {'L', 'R', 'V', 'C', 'K', 'P', 'T', '\0'};

// Refuse absurd payloads before allocating.
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 32;

void PutU64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

void PutU32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 4);
}

std::uint64_t GetU64(std::istream& in, const char* what) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw CheckpointError(std::string("checkpoint truncated while reading ") +
                          what);
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::uint32_t GetU32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw CheckpointError(std::string("checkpoint truncated while reading ") +
                          what);
  }
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

void PutMatrix(std::ostream& out, const DenseMatrix& m) {
  PutU64(out, m.rows());
  PutU64(out, m.cols());
  PutU64(out, m.size());
  for (double v : m.data()) PutU64(out, std::bit_cast<std::uint64_t>(v));
}

DenseMatrix GetMatrix(std::istream& in, std::size_t rows, std::size_t cols,
                      const char* name) {
  const std::uint64_t r = GetU64(in, name);
  const std::uint64_t c = GetU64(in, name);
  const std::uint64_t count = GetU64(in, name);
  if (r != rows || c != cols) {
    throw CheckpointError(std::string("checkpoint ") + name + " is " +
                          std::to_string(r) + "x" + std::to_string(c) +
                          " but header implies " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  if (count != r * c || count > kMaxValues) {
    throw CheckpointError(std::string("checkpoint ") + name +
                          " length prefix " + std::to_string(count) +
                          " inconsistent with its shape");
  }
  std::vector<double> data(count);
  for (auto& v : data) v = std::bit_cast<double>(GetU64(in, name));
  try {
    return DenseMatrix(rows, cols, std::move(data));
  } catch (const NumericError&) {
    throw CheckpointError(std::string("checkpoint ") + name +
                          " contains non-finite values");
  }
}

}  // namespace

void WriteCheckpoint(std::ostream& out, const ModelParams& params) {
  params.Validate();
  out.write(kMagic.data(), kMagic.size());
  PutU32(out, kCheckpointVersion);
  PutU64(out, params.shape.input_dim);
  PutU64(out, params.shape.hidden1);
  PutU64(out, params.shape.hidden2);
  PutU64(out, params.shape.classes);
  PutU64(out, params.shape.seed);
  PutMatrix(out, params.w0);
  PutMatrix(out, params.w1);
  PutMatrix(out, params.wfc);
  if (!out) throw CheckpointError("failed writing checkpoint");
}

ModelParams ReadCheckpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = GetU32(in, "version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  ModelParams p;
  p.shape.input_dim = GetU64(in, "header");
  p.shape.hidden1 = GetU64(in, "header");
  p.shape.hidden2 = GetU64(in, "header");
  p.shape.classes = GetU64(in, "header");
  p.shape.seed = GetU64(in, "header");
  const auto& s = p.shape;
  if (s.input_dim == 0 || s.hidden1 == 0 || s.hidden2 == 0 || s.classes == 0) {
    throw CheckpointError("checkpoint header has a zero dimension");
  }
  p.w0 = GetMatrix(in, s.input_dim, s.hidden1, "W0");
  p.w1 = GetMatrix(in, s.hidden1, s.hidden2, "W1");
  p.wfc = GetMatrix(in, s.hidden2, s.classes, "Wfc");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError("checkpoint has trailing bytes after Wfc");
  }
  return p;
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  WriteCheckpoint(out, params);
}

ModelParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return ReadCheckpoint(in);
}

void CheckCompatible(const ModelParams& params, const EmbeddingTable& table) {
  if (params.shape.input_dim != table.dim()) {
    throw CheckpointError("checkpoint expects " +
                          std::to_string(params.shape.input_dim) +
                          "-dimensional embeddings, table has " +
                          std::to_string(table.dim()));
  }
  if (params.shape.classes != kNumLabels) {
    throw CheckpointError("checkpoint has " +
                          std::to_string(params.shape.classes) +
                          " classes, expected " + std::to_string(kNumLabels));
  }
}

}  // namespace lrv
