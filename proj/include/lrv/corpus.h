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

// Corpus ingestion: CoNLL-U dependency graphs with sentence labels, fastText
// text-format embeddings, and the graph -> (adjacency, features) mapping.

#ifndef LRV_CORPUS_H_
#define LRV_CORPUS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lrv/linalg.h"

namespace lrv {

// The five rhetorical classes of the PubMed RCT abstracts.
enum class Label : std::size_t {
  kBackground = 0,
  kObjective = 1,
  kMethod = 2,
  kResult = 3,
  kConclusion = 4,
};

inline constexpr std::size_t kNumLabels = 5;

std::string_view LabelName(Label label);
// Accepts the canonical names and the plural METHODS, RESULTS, CONCLUSIONS.
std::optional<Label> LabelFromName(std::string_view name);
inline std::size_t LabelIndex(Label label) {
  return static_cast<std::size_t>(label);
}

// Thrown for malformed input files. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct DependencyEdge {
  std::size_t head = 0;       // 0-based token index
  std::size_t dependent = 0;  // 0-based token index
  std::string label;

  friend bool operator==(const DependencyEdge&,
                         const DependencyEdge&) = default;
};

struct SentenceGraph {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<DependencyEdge> edges;
  Label gold = Label::kBackground;

  std::size_t num_nodes() const { return tokens.size(); }

  // Throws std::invalid_argument when an invariant is broken: n >= 1,
  // indices in range, no self edges, no duplicate (head, dependent).
  void Validate() const;

  // Unique undirected pairs (i < j) derived from `edges`, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> UndirectedEdges() const;

  friend bool operator==(const SentenceGraph&, const SentenceGraph&) = default;
};

// Reads CoNLL-U. Each sentence block needs a `# label = CLASS` comment;
// `# sent_id = ID` is optional (a positional id is assigned otherwise).
// Multiword ranges (1-2) and empty nodes (1.1) are skipped; HEAD 0 marks the
// root and yields no edge.
std::vector<SentenceGraph> ParseConllu(std::istream& in);
std::vector<SentenceGraph> ParseConlluFile(const std::filesystem::path& path);

// Ã = D^-1/2 (A + I) D^-1/2 over the undirected edge set.
class NormalizedAdjacency {
 public:
  static NormalizedAdjacency FromGraph(const SentenceGraph& graph);
  // `edges` are undirected pairs; duplicates and orientation are ignored.
  static NormalizedAdjacency FromEdges(
      std::size_t num_nodes,
      const std::vector<std::pair<std::size_t, std::size_t>>& edges);
  // Wraps an already-normalized operator. Must be square, symmetric and
  // entrywise nonnegative.
  static NormalizedAdjacency FromMatrix(DenseMatrix m);

  const DenseMatrix& matrix() const { return matrix_; }
  std::size_t num_nodes() const { return matrix_.rows(); }

 private:
  explicit NormalizedAdjacency(DenseMatrix m) : matrix_(std::move(m)) {}
  DenseMatrix matrix_;
};

inline NormalizedAdjacency BuildAdjacency(const SentenceGraph& graph) {
  return NormalizedAdjacency::FromGraph(graph);
}

// Word vectors restricted to a vocabulary, plus the per-dimension box
// [low_j, high_j] spanned by the retained vectors and the OOV vector.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim,
                 std::unordered_map<std::string, std::vector<double>> entries);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool Contains(const std::string& token) const {
    return entries_.count(token) != 0;
  }

  // Lowercased form first, then the exact form, then the OOV vector.
  const std::vector<double>& Lookup(const std::string& token) const;

  const std::vector<double>& oov_vector() const { return oov_; }
  const std::vector<double>& low() const { return low_; }
  const std::vector<double>& high() const { return high_; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
  std::vector<double> oov_;
  std::vector<double> low_;
  std::vector<double> high_;
};

// Reads the fastText `.vec` layout ("count dim" header, then one
// "token v1 ... v_dim" row per word) keeping only tokens in `vocabulary`.
EmbeddingTable LoadEmbeddings(std::istream& in,
                              const std::set<std::string>& vocabulary);
EmbeddingTable LoadEmbeddingsFile(const std::filesystem::path& path,
                                  const std::set<std::string>& vocabulary);

// H0: row i is the vector of graph.tokens[i].
DenseMatrix EmbedSentence(const SentenceGraph& graph,
                          const EmbeddingTable& table);

std::string ToLower(std::string_view s);

struct LabeledDataset {
  std::vector<SentenceGraph> train;
  std::vector<SentenceGraph> dev;
  std::vector<SentenceGraph> test;

  // Exact and lowercased forms of every token across all splits.
  std::set<std::string> Vocabulary() const;

  // Throws std::invalid_argument if a sentence id appears in two splits.
  void ValidateDisjoint() const;
};

// Manifest: `key = value` lines with keys train, dev, test; relative paths
// resolve against the manifest's directory. `#` starts a comment.
LabeledDataset LoadDataset(const std::filesystem::path& manifest);

}  // namespace lrv

#endif  // LRV_CORPUS_H_
