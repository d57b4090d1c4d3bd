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

#include "lrv/corpus.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lrv {
namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "BACKGROUND", "OBJECTIVE", "METHOD", "RESULT", "CONCLUSION"};

std::string_view Trim(std::string_view s) {
  const auto not_space = [](char c) {
    return !std::isspace(static_cast<unsigned char>(c));
  };
  auto begin = std::find_if(s.begin(), s.end(), not_space);
  auto end = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return begin < end ? std::string_view(begin, end - begin) : std::string_view();
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

template <typename T>
bool ParseNumber(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Parses `# key = value`; returns false for other comments.
bool ParseComment(std::string_view line, std::string_view key,
                  std::string& value) {
  std::string_view body = Trim(line.substr(1));
  if (body.substr(0, key.size()) != key) return false;
  body = Trim(body.substr(key.size()));
  if (body.empty() || body.front() != '=') return false;
  value = std::string(Trim(body.substr(1)));
  return true;
}

struct PendingToken {
  std::string form;
  std::size_t head = 0;  // 1-based, 0 = root
  std::string deprel;
  std::size_t line = 0;
};

struct PendingBlock {
  std::string id;
  std::optional<Label> label;
  std::vector<PendingToken> tokens;
  std::size_t first_line = 0;
  bool has_content = false;
};

SentenceGraph FinishBlock(PendingBlock& block, std::size_t ordinal) {
  SentenceGraph graph;
  graph.id = block.id.empty() ? "sent-" + std::to_string(ordinal) : block.id;
  if (!block.label) {
    throw ParseError("sentence '" + graph.id + "' has no '# label' comment",
                     block.first_line);
  }
  if (block.tokens.empty()) {
    throw ParseError("sentence '" + graph.id + "' has no tokens",
                     block.first_line);
  }
  graph.gold = *block.label;
  const std::size_t n = block.tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PendingToken& tok = block.tokens[i];
    graph.tokens.push_back(tok.form);
    if (tok.head == 0) continue;
    if (tok.head > n) {
      throw ParseError("HEAD " + std::to_string(tok.head) +
                           " outside sentence of " + std::to_string(n) +
                           " tokens",
                       tok.line);
    }
    if (tok.head == i + 1) {
      throw ParseError("token is its own head", tok.line);
    }
    graph.edges.push_back({tok.head - 1, i, tok.deprel});
  }
  return graph;
}

}  // namespace

std::string_view LabelName(Label label) {
  return kLabelNames.at(LabelIndex(label));
}

std::optional<Label> LabelFromName(std::string_view name) {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[i] == name) return static_cast<Label>(i);
  }
  // The PubMed RCT release spells three of the classes in the plural.
  if (name == "METHODS") return Label::kMethod;
  if (name == "RESULTS") return Label::kResult;
  if (name == "CONCLUSIONS") return Label::kConclusion;
  return std::nullopt;
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void SentenceGraph::Validate() const {
  if (tokens.empty()) {
    throw std::invalid_argument("sentence '" + id + "' has no tokens");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    if (e.head >= tokens.size() || e.dependent >= tokens.size()) {
      throw std::invalid_argument("sentence '" + id +
                                  "': edge index out of range");
    }
    if (e.head == e.dependent) {
      throw std::invalid_argument("sentence '" + id + "': self edge");
    }
    if (!seen.emplace(e.head, e.dependent).second) {
      throw std::invalid_argument("sentence '" + id + "': duplicate edge");
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>>
SentenceGraph::UndirectedEdges() const {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : edges) {
    pairs.emplace(std::min(e.head, e.dependent), std::max(e.head, e.dependent));
  }
  return {pairs.begin(), pairs.end()};
}

std::vector<SentenceGraph> ParseConllu(std::istream& in) {
  std::vector<SentenceGraph> graphs;
  PendingBlock block;
  std::string raw;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (block.has_content) {
      graphs.push_back(FinishBlock(block, graphs.size()));
    }
    block = PendingBlock{};
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    if (!block.has_content) {
      block.has_content = true;
      block.first_line = line_no;
    }
    if (line.front() == '#') {
      std::string value;
      if (ParseComment(line, "sent_id", value)) {
        block.id = value;
      } else if (ParseComment(line, "label", value)) {
        block.label = LabelFromName(value);
        if (!block.label) {
          throw ParseError("unknown label '" + value + "'", line_no);
        }
      }
      continue;
    }

    const auto cols = Split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_no);
    }
    const std::string_view id_col = cols[0];
    if (id_col.find('-') != std::string_view::npos ||
        id_col.find('.') != std::string_view::npos) {
      continue;  // multiword range or empty node
    }
    std::size_t token_id = 0;
    if (!ParseNumber(id_col, token_id) || token_id == 0) {
      throw ParseError("bad token ID '" + std::string(id_col) + "'", line_no);
    }
    if (token_id != block.tokens.size() + 1) {
      throw ParseError("token ID " + std::to_string(token_id) +
                           " out of sequence",
                       line_no);
    }
    std::size_t head = 0;
    if (!ParseNumber(cols[6], head)) {
      throw ParseError("bad HEAD '" + std::string(cols[6]) + "'", line_no);
    }
    if (cols[1].empty()) throw ParseError("empty FORM", line_no);
    const std::string_view deprel = cols[7] == "_" ? "" : cols[7];
    block.tokens.push_back(
        {std::string(cols[1]), head, std::string(deprel), line_no});
  }
  flush();
  return graphs;
}

std::vector<SentenceGraph> ParseConlluFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return ParseConllu(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

NormalizedAdjacency NormalizedAdjacency::FromGraph(const SentenceGraph& graph) {
  graph.Validate();
  return FromEdges(graph.num_nodes(), graph.UndirectedEdges());
}

NormalizedAdjacency NormalizedAdjacency::FromEdges(
    std::size_t num_nodes,
    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  DenseMatrix a = DenseMatrix::Identity(num_nodes);
  for (auto [i, j] : edges) {
    if (i >= num_nodes || j >= num_nodes || i == j) {
      throw std::invalid_argument("NormalizedAdjacency: bad edge (" +
                                  std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
    }
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  std::vector<double> degree(num_nodes, 0.0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    for (double v : a.row(i)) degree[i] += v;
  }
  // deg_i * deg_j is commutative in IEEE arithmetic, so the result is
  // exactly symmetric.
  for (std::size_t i = 0; i < num_nodes; ++i) {
    for (std::size_t j = 0; j < num_nodes; ++j) {
      if (a(i, j) != 0.0) a(i, j) = 1.0 / std::sqrt(degree[i] * degree[j]);
    }
  }
  return NormalizedAdjacency(std::move(a));
}

NormalizedAdjacency NormalizedAdjacency::FromMatrix(DenseMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("NormalizedAdjacency: " + m.ShapeString() +
                         " is not a non-empty square matrix");
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) < 0.0 || m(i, j) != m(j, i)) {
        throw std::invalid_argument(
            "NormalizedAdjacency: matrix must be symmetric and nonnegative");
      }
    }
  }
  return NormalizedAdjacency(std::move(m));
}

EmbeddingTable::EmbeddingTable(
    std::size_t dim,
    std::unordered_map<std::string, std::vector<double>> entries)
    : dim_(dim),
      entries_(std::move(entries)),
      oov_(dim, 0.0),
      low_(oov_),
      high_(oov_) {
  for (const auto& [token, vec] : entries_) {
    if (vec.size() != dim_) {
      throw std::invalid_argument("embedding for '" + token + "' has " +
                                  std::to_string(vec.size()) +
                                  " values, expected " + std::to_string(dim_));
    }
    for (std::size_t j = 0; j < dim_; ++j) {
      low_[j] = std::min(low_[j], vec[j]);
      high_[j] = std::max(high_[j], vec[j]);
    }
  }
}

const std::vector<double>& EmbeddingTable::Lookup(
    const std::string& token) const {
  if (auto it = entries_.find(ToLower(token)); it != entries_.end()) {
    return it->second;
  }
  if (auto it = entries_.find(token); it != entries_.end()) return it->second;
  return oov_;
}

EmbeddingTable LoadEmbeddings(std::istream& in,
                              const std::set<std::string>& vocabulary) {
  std::string raw;
  if (!std::getline(in, raw)) throw ParseError("missing header", 1);
  const auto header = SplitWhitespace(raw);
  std::size_t count = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !ParseNumber(header[0], count) ||
      !ParseNumber(header[1], dim) || dim == 0) {
    throw ParseError("header must be '<count> <dim>'", 1);
  }

  std::unordered_map<std::string, std::vector<double>> entries;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto fields = SplitWhitespace(raw);
    if (fields.empty()) continue;
    ++rows;
    if (fields.size() != dim + 1) {
      throw ParseError("expected token plus " + std::to_string(dim) +
                           " values, found " +
                           std::to_string(fields.size() - 1) + " values",
                       line_no);
    }
    const std::string token(fields[0]);
    if (!vocabulary.count(token)) continue;
    std::vector<double> vec(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!ParseNumber(fields[j + 1], vec[j]) || !std::isfinite(vec[j])) {
        throw ParseError("bad value '" + std::string(fields[j + 1]) + "'",
                         line_no);
      }
    }
    entries.emplace(token, std::move(vec));
  }
  if (rows != count) {
    throw ParseError("header announces " + std::to_string(count) +
                         " vectors but file has " + std::to_string(rows),
                     1);
  }
  return EmbeddingTable(dim, std::move(entries));
}

EmbeddingTable LoadEmbeddingsFile(const std::filesystem::path& path,
                                  const std::set<std::string>& vocabulary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings " + path.string());
  try {
    return LoadEmbeddings(in, vocabulary);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

DenseMatrix EmbedSentence(const SentenceGraph& graph,
                          const EmbeddingTable& table) {
  DenseMatrix h0(graph.num_nodes(), table.dim());
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    const auto& vec = table.Lookup(graph.tokens[i]);
    std::copy(vec.begin(), vec.end(), h0.row(i).begin());
  }
  return h0;
}

std::set<std::string> LabeledDataset::Vocabulary() const {
  std::set<std::string> vocab;
  for (const auto* split : {&train, &dev, &test}) {
    for (const auto& g : *split) {
      for (const auto& t : g.tokens) {
        vocab.insert(t);
        vocab.insert(ToLower(t));
      }
    }
  }
  return vocab;
}

void LabeledDataset::ValidateDisjoint() const {
  std::set<std::string> seen;
  for (const auto* split : {&train, &dev, &test}) {
    std::set<std::string> local;
    for (const auto& g : *split) local.insert(g.id);
    for (const auto& id : local) {
      if (!seen.insert(id).second) {
        throw std::invalid_argument("sentence id '" + id +
                                    "' appears in more than one split");
      }
    }
  }
}

LabeledDataset LoadDataset(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open manifest " + manifest.string());
  const auto base = manifest.parent_path();
  LabeledDataset dataset;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(manifest.string() + ": expected key = value", line_no);
    }
    const std::string key(Trim(line.substr(0, eq)));
    std::filesystem::path path(std::string(Trim(line.substr(eq + 1))));
    if (path.is_relative()) path = base / path;
    if (key == "train") {
      dataset.train = ParseConlluFile(path);
    } else if (key == "dev") {
      dataset.dev = ParseConlluFile(path);
    } else if (key == "test") {
      dataset.test = ParseConlluFile(path);
    } else {
      throw ParseError(manifest.string() + ": unknown key '" + key + "'",
                       line_no);
    }
  }
  for (const auto* split : {&dataset.train, &dataset.dev, &dataset.test}) {
    for (const auto& g : *split) g.Validate();
  }
  dataset.ValidateDisjoint();
  return dataset;
}

}  // namespace lrv
