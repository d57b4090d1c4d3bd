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

// Generates the synthetic desk-scale fixture corpus: dependency-parsed
// sentences in CoNLL-U with labels, a fastText-format embedding file and a
// manifest.
//
// Every sentence contains one cue noun (category a) with a cue modifier
// (category b) attached to it, and the label is (a + b) mod 5. Neither word
// alone determines the label, so a classifier has to read the attachment,
// and some sentences carry a second, distractor modifier hanging off an
// unrelated noun.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrv/corpus.h"
#include "lrv/format.h"
#include "lrv/model.h"
#include "lrv/render.h"

namespace {

using lrv::DependencyEdge;
using lrv::SentenceGraph;
using lrv::SplitMix;

const std::vector<std::vector<std::string>> kCueNouns = {
    {"patients", "participants", "subjects"},
    {"outcomes", "endpoints", "measures"},
    {"trials", "studies", "cohorts"},
    {"doses", "regimens", "treatments"},
    {"rates", "levels", "scores"},
};

const std::vector<std::vector<std::string>> kCueModifiers = {
    {"significant", "marked", "notable"},
    {"primary", "secondary", "main"},
    {"randomized", "controlled", "blinded"},
    {"adverse", "severe", "serious"},
    {"previous", "prior", "earlier"},
};

const std::vector<std::string> kVerbs = {"were",     "showed",   "included",
                                         "received", "reported", "assessed",
                                         "compared", "improved", "remained"};
const std::vector<std::string> kNouns = {
    "group", "week",    "analysis", "baseline", "year", "hospital",
    "therapy", "placebo", "month",  "center",   "protocol", "data"};
const std::vector<std::string> kPreps = {"of", "in", "with", "at", "for",
                                         "during"};
const std::vector<std::string> kDets = {"the", "a", "all", "each", "these"};
const std::vector<std::string> kAdverbs = {"also", "further", "however"};
// Numbers are deliberately absent from the embedding file (OOV).
const std::vector<std::string> kNumbers = {"116", "24", "12", "3", "50",
                                           "200"};
// Present in the embedding file, never used in sentences.
const std::vector<std::string> kUnused = {
    "cell",  "gene",   "protein", "mouse",   "tissue", "signal", "cancer",
    "tumor", "dose-response", "enzyme", "receptor", "pathway", "serum",
    "plasma", "insulin", "glucose", "surgery", "infection", "vaccine",
    "antibody"};

const std::string& Pick(const std::vector<std::string>& pool, SplitMix& rng) {
  return pool[rng.Below(pool.size())];
}

double Gaussian(SplitMix& rng) {
  // Box-Muller on our own generator keeps the output platform independent.
  const double u1 = 1.0 - rng.Uniform();
  const double u2 = rng.Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

// Incrementally builds a sentence: tokens in surface order plus arcs.
class SentenceBuilder {
 public:
  std::size_t Add(const std::string& token) {
    graph_.tokens.push_back(token);
    return graph_.tokens.size() - 1;
  }
  void Arc(std::size_t head, std::size_t dependent, const std::string& label) {
    graph_.edges.push_back({head, dependent, label});
  }
  SentenceGraph Finish(std::string id, lrv::Label label) {
    graph_.id = std::move(id);
    graph_.gold = label;
    graph_.tokens[0] = Capitalize(graph_.tokens[0]);
    // Edge order as ParseConllu produces it.
    std::sort(graph_.edges.begin(), graph_.edges.end(),
              [](const DependencyEdge& a, const DependencyEdge& b) {
                return a.dependent < b.dependent;
              });
    graph_.Validate();
    return std::move(graph_);
  }

 private:
  SentenceGraph graph_;
};

// Optional "<prep> <det> <noun>" attached to `head`; may carry a distractor
// modifier on the noun.
void AddPrepPhrase(SentenceBuilder& b, std::size_t head, const char* rel,
                   SplitMix& rng, const std::string* distractor) {
  const std::size_t prep = b.Add(Pick(kPreps, rng));
  const std::size_t det = b.Add(Pick(kDets, rng));
  std::size_t mod = 0;
  if (distractor) mod = b.Add(*distractor);
  const std::size_t noun = b.Add(Pick(kNouns, rng));
  b.Arc(noun, prep, "case");
  b.Arc(noun, det, "det");
  if (distractor) b.Arc(noun, mod, "amod");
  b.Arc(head, noun, rel);
}

SentenceGraph MakeSentence(std::size_t index, lrv::Label label, SplitMix& rng) {
  const std::size_t cls = lrv::LabelIndex(label);
  const std::size_t noun_cat = rng.Below(5);
  const std::size_t mod_cat = (cls + 5 - noun_cat) % 5;
  const std::string noun = Pick(kCueNouns[noun_cat], rng);
  const std::string mod = Pick(kCueModifiers[mod_cat], rng);
  std::string distractor_word;
  const std::string* distractor = nullptr;
  if (rng.Uniform() < 0.35) {
    distractor_word = Pick(kCueModifiers[rng.Below(5)], rng);
    distractor = &distractor_word;
  }

  SentenceBuilder b;
  switch (rng.Below(3)) {
    case 0: {  // The <mod> <noun> <verb> <prep> <det> <n> .
      const std::size_t det = b.Add(Pick(kDets, rng));
      const std::size_t m = b.Add(mod);
      const std::size_t n = b.Add(noun);
      const std::size_t v = b.Add(Pick(kVerbs, rng));
      b.Arc(n, det, "det");
      b.Arc(n, m, "amod");
      b.Arc(v, n, "nsubj");
      AddPrepPhrase(b, v, "obl", rng, distractor);
      if (rng.Uniform() < 0.5) AddPrepPhrase(b, v, "obl", rng, nullptr);
      b.Arc(v, b.Add("."), "punct");
      break;
    }
    case 1: {  // <det> <n> <verb> <det> <mod> <noun> <prep> <det> <n> .
      const std::size_t det = b.Add(Pick(kDets, rng));
      const std::size_t subj = b.Add(Pick(kNouns, rng));
      const std::size_t v = b.Add(Pick(kVerbs, rng));
      const std::size_t det2 = b.Add(Pick(kDets, rng));
      const std::size_t m = b.Add(mod);
      const std::size_t n = b.Add(noun);
      b.Arc(subj, det, "det");
      b.Arc(v, subj, "nsubj");
      b.Arc(n, det2, "det");
      b.Arc(n, m, "amod");
      b.Arc(v, n, "obj");
      AddPrepPhrase(b, n, "nmod", rng, distractor);
      b.Arc(v, b.Add("."), "punct");
      break;
    }
    default: {  // <adv> , <num> <noun> were <mod> <prep> <det> <n> .
      const std::size_t adv = b.Add(Pick(kAdverbs, rng));
      const std::size_t comma = b.Add(",");
      const std::size_t num = b.Add(Pick(kNumbers, rng));
      const std::size_t n = b.Add(noun);
      const std::size_t cop = b.Add("were");
      const std::size_t m = b.Add(mod);
      b.Arc(m, adv, "advmod");
      b.Arc(m, comma, "punct");
      b.Arc(n, num, "nummod");
      b.Arc(m, n, "nsubj");
      b.Arc(m, cop, "cop");
      AddPrepPhrase(b, m, "obl", rng, distractor);
      b.Arc(m, b.Add("."), "punct");
      break;
    }
  }
  char id[32];
  std::snprintf(id, sizeof(id), "fx-%04zu", index);
  return b.Finish(id, label);
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic fixture corpus"};
  std::string out_dir = "data/fixture";
  std::uint64_t seed = 20191103;
  std::size_t per_class = 100;
  std::size_t dim = 32;
  std::size_t dev = 50;
  std::size_t test = 50;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--per-class", per_class, "Sentences per label");
  app.add_option("--dim", dim, "Embedding dimension");
  app.add_option("--dev", dev, "Dev split size");
  app.add_option("--test", test, "Test split size");
  CLI11_PARSE(app, argc, argv);

  try {
    SplitMix rng(seed);
    const std::size_t total = per_class * lrv::kNumLabels;
    if (dev + test >= total) throw std::runtime_error("splits exceed corpus");

    std::vector<lrv::Label> labels;
    for (std::size_t k = 0; k < total; ++k) {
      labels.push_back(static_cast<lrv::Label>(k % lrv::kNumLabels));
    }
    for (std::size_t i = labels.size(); i > 1; --i) {
      std::swap(labels[i - 1], labels[rng.Below(i)]);
    }
    std::vector<SentenceGraph> sentences;
    for (std::size_t k = 0; k < total; ++k) {
      sentences.push_back(MakeSentence(k, labels[k], rng));
    }
    const std::vector<SentenceGraph> train(sentences.begin(),
                                           sentences.end() - dev - test);
    const std::vector<SentenceGraph> dev_split(sentences.end() - dev - test,
                                               sentences.end() - test);
    const std::vector<SentenceGraph> test_split(sentences.end() - test,
                                                sentences.end());

    // Embeddings: cue categories share a centroid, everything else is
    // independent noise.
    SplitMix emb_rng(seed ^ 0xFA57ULL);
    auto vec = [&](const std::vector<double>* centroid, double spread) {
      std::vector<double> v(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        v[j] = (centroid ? (*centroid)[j] : 0.0) + spread * Gaussian(emb_rng);
      }
      return v;
    };
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (const auto* groups : {&kCueNouns, &kCueModifiers}) {
      for (const auto& group : *groups) {
        const auto centroid = vec(nullptr, 0.5);
        for (const auto& w : group) rows.emplace_back(w, vec(&centroid, 0.2));
      }
    }
    for (const auto* pool : {&kVerbs, &kNouns, &kPreps, &kDets, &kAdverbs,
                             &kUnused}) {
      for (const auto& w : *pool) rows.emplace_back(w, vec(nullptr, 0.5));
    }
    rows.emplace_back(",", vec(nullptr, 0.5));
    rows.emplace_back(".", vec(nullptr, 0.5));

    std::string emb = std::to_string(rows.size()) + " " + std::to_string(dim) + "\n";
    for (const auto& [word, v] : rows) {
      emb += word;
      for (double x : v) emb += " " + lrv::FormatFixed(x, 4);
      emb += "\n";
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    WriteFile(dir / "train.conllu", lrv::WriteConllu(train));
    WriteFile(dir / "dev.conllu", lrv::WriteConllu(dev_split));
    WriteFile(dir / "test.conllu", lrv::WriteConllu(test_split));
    WriteFile(dir / "embeddings.vec", emb);
    WriteFile(dir / "manifest.txt",
              "# Synthetic fixture corpus, generated by lrv_make_fixture --seed " +
                  std::to_string(seed) + "\ntrain = train.conllu\n"
                  "dev = dev.conllu\ntest = test.conllu\n");
    std::cout << "wrote " << total << " sentences (" << train.size() << "/"
              << dev_split.size() << "/" << test_split.size() << ") and "
              << rows.size() << " vectors to " << out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
