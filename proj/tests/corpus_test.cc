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

#include <cmath>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "lrv/corpus.h"
#include "lrv/render.h"
#include "support/test_support.h"

namespace lrv {
namespace {

using ::testing::HasSubstr;

const char* const kTwoSentences =
    "# newdoc id = abstract-1\n"
    "# sent_id = s1\n"
    "# label = METHODS\n"
    "1\tPatients\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
    "2\twere\t_\t_\t_\t_\t0\troot\t_\t_\n"
    "3-4\trandomized.\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "3\trandomized\t_\t_\t_\t_\t2\txcomp\t_\t_\n"
    "3.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "4\t.\t_\t_\t_\t_\t2\t_\t_\t_\n"
    "\n"
    "# label = RESULTS\n"
    "1\tIt\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tworked\t_\t_\t_\t_\t0\troot\t_\t_\n";

std::vector<SentenceGraph> Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseConllu(in);
}

std::string ParseErrorText(const std::string& text) {
  try {
    Parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(LabelTest, NamesRoundTrip) {
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const Label label = static_cast<Label>(c);
    EXPECT_EQ(LabelFromName(LabelName(label)), label);
  }
  EXPECT_EQ(LabelFromName("METHODS"), Label::kMethod);
  EXPECT_FALSE(LabelFromName("DISCUSSION").has_value());
}

TEST(ConlluTest, ParsesCommentsRangesAndEmptyNodes) {
  const auto graphs = Parse(kTwoSentences);
  ASSERT_EQ(graphs.size(), 2u);
  const SentenceGraph& g = graphs[0];
  EXPECT_EQ(g.id, "s1");
  EXPECT_EQ(g.gold, Label::kMethod);
  EXPECT_EQ(g.tokens, (std::vector<std::string>{"Patients", "were", "randomized", "."}));
  ASSERT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.edges[0], (DependencyEdge{1, 0, "nsubj"}));
  EXPECT_EQ(g.edges[1], (DependencyEdge{1, 2, "xcomp"}));
  EXPECT_EQ(g.edges[2], (DependencyEdge{1, 3, ""}));
  EXPECT_EQ(graphs[1].gold, Label::kResult);
  EXPECT_EQ(graphs[1].id, "sent-1");  // 0-based block position
}

TEST(ConlluTest, MissingLabelNamesTheSentence) {
  const std::string text = "# sent_id = abc\n1\tHi\t_\t_\t_\t_\t0\troot\t_\t_\n";
  EXPECT_THAT(ParseErrorText(text), HasSubstr("abc"));
}

TEST(ConlluTest, RejectsMalformedRows) {
  const std::string head = "# label = RESULTS\n";
  EXPECT_THAT(ParseErrorText(head + "1\tHi\t_\t_\t_\t_\t5\tdep\t_\t_\n"),
              HasSubstr("line 2"));
  EXPECT_NE(ParseErrorText(head + "1\tHi\t_\t_\t_\t_\t1\tdep\t_\t_\n"), "");
  EXPECT_NE(ParseErrorText(head + "1\tHi\t_\t_\t0\troot\t_\t_\n"), "");
  EXPECT_NE(ParseErrorText(head + "2\tHi\t_\t_\t_\t_\t0\troot\t_\t_\n"), "");
  EXPECT_NE(ParseErrorText("# label = SUMMARY\n1\tHi\t_\t_\t_\t_\t0\troot\t_\t_\n"), "");
  EXPECT_NE(ParseErrorText(head + "x\tHi\t_\t_\t_\t_\t0\troot\t_\t_\n"), "");
}

TEST(ConlluTest, WriterRoundTrips) {
  const auto graphs = Parse(kTwoSentences);
  EXPECT_EQ(Parse(WriteConllu(graphs)), graphs);
}

TEST(ConlluTest, WriterRejectsTwoHeads) {
  SentenceGraph g = testing::MakeGraph("x", {"a", "b", "c"}, {{0, 2}, {1, 2}});
  EXPECT_THROW(WriteConllu({g}), std::invalid_argument);
}

TEST(SentenceGraphTest, ValidateAndUndirectedEdges) {
  SentenceGraph g = testing::MakeGraph("x", {"a", "b", "c"}, {{1, 0}, {0, 1}, {2, 1}});
  EXPECT_NO_THROW(g.Validate());
  EXPECT_EQ(g.UndirectedEdges(),
            (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
  g.edges.push_back({2, 2, "self"});
  EXPECT_THROW(g.Validate(), std::invalid_argument);
  EXPECT_THROW(testing::MakeGraph("e", {}, {}).Validate(), std::invalid_argument);
}

TEST(AdjacencyTest, PathOfThreeHandValues) {
  // Degrees with self loops are 2, 3, 2.
  const auto a = NormalizedAdjacency::FromEdges(3, {{0, 1}, {1, 2}}).matrix();
  EXPECT_DOUBLE_EQ(a(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(a(1, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 1.0 / std::sqrt(6.0));
  EXPECT_EQ(a(0, 2), 0.0);
}

TEST(AdjacencyTest, SymmetricAndMatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const auto edges = testing::RandomEdges(rng, n, 2);
    const auto a = NormalizedAdjacency::FromEdges(n, edges).matrix();
    EXPECT_EQ(a, a.Transpose());
    // Textbook scaling as an independent reference.
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) b[i][i] = 1.0;
    for (auto [i, j] : edges) b[i][j] = b[j][i] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double di = 0, dj = 0;
        for (std::size_t k = 0; k < n; ++k) di += b[i][k], dj += b[j][k];
        EXPECT_NEAR(a(i, j), b[i][j] / std::sqrt(di * dj), 1e-15);
      }
    }
  }
}

TEST(AdjacencyTest, FromMatrixValidates) {
  EXPECT_THROW(NormalizedAdjacency::FromMatrix(DenseMatrix{{1, 0.5}, {0.2, 1}}),
               std::invalid_argument);
  EXPECT_THROW(NormalizedAdjacency::FromMatrix(DenseMatrix{{1, -0.5}, {-0.5, 1}}),
               std::invalid_argument);
  EXPECT_THROW(NormalizedAdjacency::FromMatrix(DenseMatrix(2, 3)), std::invalid_argument);
  EXPECT_NO_THROW(NormalizedAdjacency::FromMatrix(DenseMatrix::Identity(3)));
}

TEST(EmbeddingsTest, FiltersVocabularyAndTracksBounds) {
  std::istringstream in(
      "4 2\n"
      "patients 0.5 -1.5\n"
      "Were 2.0 0.25\n"
      "unused 9.0 9.0\n"
      ". -0.5 -0.5\n");
  const EmbeddingTable table =
      LoadEmbeddings(in, {"patients", "Were", "were", ".", "missing"});
  EXPECT_EQ(table.dim(), 2u);
  EXPECT_EQ(table.size(), 3u);
  EXPECT_FALSE(table.Contains("unused"));
  EXPECT_EQ(table.Lookup("Patients"), (std::vector<double>{0.5, -1.5}));
  EXPECT_EQ(table.Lookup("Were"), (std::vector<double>{2.0, 0.25}));
  EXPECT_EQ(table.Lookup("missing"), (std::vector<double>{0.0, 0.0}));
  // Bounds span the retained vectors and the zero OOV vector.
  EXPECT_EQ(table.low(), (std::vector<double>{-0.5, -1.5}));
  EXPECT_EQ(table.high(), (std::vector<double>{2.0, 0.25}));
}

TEST(EmbeddingsTest, ReportsBadRowsWithLineNumbers) {
  std::istringstream short_row("2 2\na 1 2\nb 1\n");
  try {
    LoadEmbeddings(short_row, {"a", "b"});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream wrong_count("3 1\na 1\n");
  EXPECT_THROW(LoadEmbeddings(wrong_count, {"a"}), ParseError);
  std::istringstream bad_header("x y\n");
  EXPECT_THROW(LoadEmbeddings(bad_header, {}), ParseError);
}

TEST(EmbeddingsTest, EmbedSentenceRows) {
  const EmbeddingTable table(2, {{"a", {1.0, 2.0}}});
  const SentenceGraph g = testing::MakeGraph("x", {"A", "zzz"}, {{0, 1}});
  EXPECT_EQ(EmbedSentence(g, table), (DenseMatrix{{1, 2}, {0, 0}}));
}

TEST(DatasetTest, ManifestResolvesRelativePaths) {
  testing::ScratchDir dir("manifest");
  std::filesystem::create_directories(dir / "splits");
  testing::WriteFile(dir / "splits" / "a.conllu", kTwoSentences);
  testing::WriteFile(dir / "splits" / "b.conllu",
                     "# sent_id = t1\n# label = OBJECTIVE\n"
                     "1\tAim\t_\t_\t_\t_\t0\troot\t_\t_\n");
  testing::WriteFile(dir / "m.txt",
                     "# comment\ntrain = splits/a.conllu\n\ntest = splits/b.conllu\n");
  const LabeledDataset data = LoadDataset(dir / "m.txt");
  EXPECT_EQ(data.train.size(), 2u);
  EXPECT_TRUE(data.dev.empty());
  EXPECT_EQ(data.test.size(), 1u);
  EXPECT_TRUE(data.Vocabulary().count("patients"));
  EXPECT_TRUE(data.Vocabulary().count("Patients"));

  testing::WriteFile(dir / "dup.txt", "train = splits/a.conllu\ndev = splits/a.conllu\n");
  EXPECT_THROW(LoadDataset(dir / "dup.txt"), std::invalid_argument);
  testing::WriteFile(dir / "bad.txt", "training = splits/a.conllu\n");
  EXPECT_THROW(LoadDataset(dir / "bad.txt"), ParseError);
}

// The committed fixture uses the same interface the preprocessing pipeline
// emits: sent_id and label comments on every block.
TEST(DatasetTest, FixtureLoadsWithExpectedSplitSizes) {
  const LabeledDataset data = LoadDataset(testing::FixtureDir() / "manifest.txt");
  EXPECT_EQ(data.train.size(), 400u);
  EXPECT_EQ(data.dev.size(), 50u);
  EXPECT_EQ(data.test.size(), 50u);
  const std::string text = testing::ReadFile(testing::FixtureDir() / "test.conllu");
  EXPECT_EQ(WriteConllu(data.test), text);
}

}  // namespace
}  // namespace lrv
