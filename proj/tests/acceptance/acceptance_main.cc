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

// Acceptance run over the fixture corpus. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "lrv/corpus.h"
#include "lrv/experiments.h"
#include "lrv/format.h"
#include "lrv/metrics.h"
#include "lrv/model.h"
#include "lrv/relevance.h"
#include "lrv/render.h"
#include "lrv/run_config.h"
#include "support/checks.h"
#include "support/test_support.h"

namespace lrv {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kRelTol = 1e-6;
constexpr double kAbsTol = 1e-12;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Sci(double v) {
  std::ostringstream s;
  s << std::scientific;
  s.precision(2);
  s << v;
  return s.str();
}

struct Verdict {
  bool pass;
  std::string detail;
};

class Report {
 public:
  void Add(const std::string& name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail
              << std::endl;
    failures_ += v.pass ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

// Runs the lrv executable, stdout and stderr appended to `log`.
int RunTool(const std::vector<std::string>& args, const fs::path& log) {
  std::string cmd = std::string("\"") + LRV_TOOL_PATH + "\"";
  for (const auto& a : args) cmd += " \"" + a + "\"";
  cmd += " >>\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool SameFiles(const fs::path& a, const fs::path& b, std::size_t& compared,
               std::string& first_diff) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::size_t in_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++in_b;
  if (names.size() != in_b) {
    first_diff = "file counts " + std::to_string(names.size()) + " vs " + std::to_string(in_b);
    return false;
  }
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    ++compared;
    if (testing::ReadFile(a / name) != testing::ReadFile(b / name)) {
      first_diff = name.string();
      return false;
    }
  }
  return true;
}

bool WellFormedSvg(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error&) {
    return false;
  }
  return tree.count("svg") == 1;
}

int Main() {
  testing::ScratchDir scratch("acceptance");
  const fs::path config = testing::SourceDir() / "configs" / "fixture.conf";
  const RunConfig run = LoadRunConfig(config);
  const LabeledDataset data = LoadDataset(run.manifest);
  const EmbeddingTable table = LoadEmbeddingsFile(run.embeddings, data.Vocabulary());
  std::cout << "fixture: " << data.train.size() << " train / " << data.dev.size()
            << " dev / " << data.test.size() << " test, seed " << run.train.seed
            << ", " << run.train.epochs << " epochs" << std::endl;

  // The pipeline run every data-dependent criterion below refers to.
  const auto train_start = Clock::now();
  const TrainResult trained = Train(data, table, run.train);
  const double train_seconds = Seconds(train_start);
  const ModelParams& params = trained.params;

  Report report;

  report.Add("conservation", [&] {
    const auto start = Clock::now();
    double worst = 0.0;
    std::size_t ok = 0;
    for (const auto& g : data.test) {
      const RelevanceTrace t = Explain(params, g, table);
      ok += ConservationHolds(t, kRelTol, kAbsTol) ? 1 : 0;
      worst = std::max(worst, MaxRelativeResidual(t));
    }
    const double secs = Seconds(start);
    return Verdict{ok == data.test.size() && secs < 60.0,
                   std::to_string(ok) + "/" + std::to_string(data.test.size()) +
                       " test graphs within 1e-6 rel + 1e-12 abs on all three "
                       "checkpoints and both edge accountings; worst relative "
                       "residual " + Sci(worst) + "; " + FormatFixed(secs, 2) + " s"};
  });

  report.Add("oracle equivalence", [&] {
    const auto s = testing::CompareWithLrpOracle(20191103, 200);
    return Verdict{s.instances >= 100 && s.worst <= 1e-10,
                   std::to_string(s.instances) + " random instances, " +
                       std::to_string(s.comparisons) + " values, max-abs error " +
                       Sci(s.worst) + " (bound 1e-10)"};
  });

  report.Add("gradient check", [&] {
    const auto s = testing::GradientCheck(4242, 100, 1e-5);
    return Verdict{s.worst <= 1e-4,
                   std::to_string(s.instances) + " instances (n<=4, d<=5, f1=f2<=4), " +
                       std::to_string(s.comparisons) + " entries, h=1e-5, max relative error " +
                       Sci(s.worst) + " (bound 1e-4)"};
  });

  report.Add("perturbation faithfulness", [&] {
    const auto start = Clock::now();
    const PerturbationResult r = RunPerturbation(params, data.test, table, DefaultFractions());
    const double secs = train_seconds + Seconds(start);
    const double most = r.most.MeanPerturbedF1();
    const double least = r.least.MeanPerturbedF1();
    return Verdict{most < least && secs < 600.0,
                   "mean weighted F1 over fractions 0.1-0.9: most-relevant-first " +
                       FormatFixed(most, 4) + " < least-relevant-first " +
                       FormatFixed(least, 4) + "; train+perturb " + FormatFixed(secs, 1) + " s"};
  });

  report.Add("classifier quality", [&] {
    std::vector<std::size_t> counts(kNumLabels, 0);
    for (const auto& g : data.train) ++counts[LabelIndex(g.gold)];
    const std::size_t majority =
        std::max_element(counts.begin(), counts.end()) - counts.begin();
    std::vector<std::size_t> gold;
    for (const auto& g : data.dev) gold.push_back(LabelIndex(g.gold));
    const double baseline =
        WeightedF1(gold, std::vector<std::size_t>(gold.size(), majority));
    const double dev = WeightedF1(gold, PredictAll(params, data.dev, table));

    // Ten-sentence overfit: first ten train sentences, no dev split.
    LabeledDataset small;
    small.train.assign(data.train.begin(), data.train.begin() + 10);
    TrainConfig cfg = run.train;
    cfg.adam.learning_rate = 0.01;
    cfg.epochs = 150;
    cfg.batch_size = 10;
    const TrainResult over = Train(small, table, cfg);
    const auto pred = PredictAll(over.params, small.train, table);
    std::size_t correct = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      correct += pred[k] == LabelIndex(small.train[k].gold) ? 1 : 0;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
    return Verdict{dev >= 1.5 * baseline && acc == 1.0,
                   "dev weighted F1 " + FormatFixed(dev, 4) + " >= 1.5 x majority baseline " +
                       FormatFixed(baseline, 4) + " (best epoch " +
                       std::to_string(trained.best_epoch) + "); 10-sentence overfit train accuracy " +
                       FormatFixed(acc, 4)};
  });

  report.Add("batching equivalence", [&] {
    std::vector<const SentenceGraph*> all;
    for (const auto* split : {&data.train, &data.dev, &data.test}) {
      for (const auto& g : *split) all.push_back(&g);
    }
    double worst = 0.0;
    for (std::size_t begin = 0; begin < all.size(); begin += 32) {
      GraphBatch batch;
      const std::size_t end = std::min(all.size(), begin + 32);
      for (std::size_t k = begin; k < end; ++k) {
        batch.Add(BuildAdjacency(*all[k]), EmbedSentence(*all[k], table));
      }
      const BatchActivations acts = ForwardBatch(params, batch);
      for (std::size_t k = begin; k < end; ++k) {
        const auto single =
            Forward(params, BuildAdjacency(*all[k]), EmbedSentence(*all[k], table)).logits;
        for (std::size_t c = 0; c < single.cols(); ++c) {
          worst = std::max(worst, std::abs(acts.logits(k - begin, c) - single(0, c)));
        }
      }
    }
    return Verdict{worst <= 1e-10, std::to_string(all.size()) +
                                       " fixture graphs in batches of 32, max-abs logit "
                                       "difference " + Sci(worst) + " (bound 1e-10)"};
  });

  report.Add("output weights nonnegative", [&] {
    std::size_t clamped = 0;
    for (const auto& s : trained.steps) clamped += s.wfc_min >= 0.0 ? 1 : 0;
    double min_logit = INFINITY;
    for (const auto& g : data.test) {
      const auto logits = Forward(params, BuildAdjacency(g), EmbedSentence(g, table)).logits;
      min_logit = std::min(min_logit, logits.MinCoeff());
    }
    return Verdict{!trained.steps.empty() && clamped == trained.steps.size() &&
                       min_logit >= 0.0,
                   "Wfc >= 0 after " + std::to_string(clamped) + "/" +
                       std::to_string(trained.steps.size()) +
                       " optimizer steps; smallest test logit " + Sci(min_logit)};
  });

  std::vector<fs::path> runs = {scratch / "run-a", scratch / "run-b"};
  report.Add("determinism", [&] {
    const fs::path log = scratch / "tool.log";
    for (const auto& out : runs) {
      if (RunTool({"train", "--config", config.string(), "--out", out.string()}, log) != 0 ||
          RunTool({"explain", "--config", config.string(), "--out", out.string(), "--all",
                   "--render", "dot,svg,tex"},
                  log) != 0) {
        return Verdict{false, "lrv exited nonzero, see:\n" + testing::ReadFile(log)};
      }
    }
    const std::string a = testing::ReadFile(runs[0] / "model.ckpt");
    const std::string b = testing::ReadFile(runs[1] / "model.ckpt");
    std::size_t compared = 0;
    std::string diff;
    const bool traces_same = SameFiles(runs[0] / "traces", runs[1] / "traces", compared, diff);
    // The separate processes must also agree with the in-process run above.
    const bool matches_library = LoadCheckpoint(runs[0] / "model.ckpt") == params;
    return Verdict{!a.empty() && a == b && traces_same && compared == data.test.size() &&
                       matches_library,
                   "two train + explain --all runs: checkpoints " +
                       std::string(a == b ? "identical" : "DIFFER") + " (" +
                       std::to_string(a.size()) + " bytes), " + std::to_string(compared) +
                       " trace files " + (traces_same ? "identical" : "differ at " + diff) +
                       ", checkpoint " + (matches_library ? "equals" : "DIFFERS from") +
                       " the in-process model"};
  });

  report.Add("renderer contract", [&] {
    std::size_t svgs = 0, bad_svgs = 0;
    for (const auto& e : fs::directory_iterator(runs[0] / "figures")) {
      if (e.path().extension() != ".svg") continue;
      ++svgs;
      bad_svgs += WellFormedSvg(testing::ReadFile(e.path())) ? 0 : 1;
    }
    double worst_sum = 0.0;
    std::size_t arcs = 0, bad_arcs = 0, layers = 0;
    for (const auto& g : data.test) {
      const RelevanceTrace t = Explain(params, g, table);
      for (const LayerFigure& fig : NormalizeLayers(t, g, run.style)) {
        if (fig.degenerate) continue;
        ++layers;
        double total = 0.0;
        for (double p : fig.node_percent) total += p;
        worst_sum = std::max(worst_sum, std::abs(total - 100.0));
        for (const FigureArc& arc : fig.arcs) {
          ++arcs;
          bad_arcs += (arc.width >= run.style.width_base && arc.width <= run.style.width_max) ? 0 : 1;
        }
      }
    }
    return Verdict{svgs == 3 * data.test.size() && bad_svgs == 0 && worst_sum <= 0.01 &&
                       bad_arcs == 0,
                   std::to_string(svgs - bad_svgs) + "/" + std::to_string(svgs) +
                       " SVG files well-formed; " + std::to_string(layers) +
                       " layer figures, max |sum(node %) - 100| " + Sci(worst_sum) + "; " +
                       std::to_string(arcs - bad_arcs) + "/" + std::to_string(arcs) +
                       " arc widths within [" + FormatFixed(run.style.width_base, 1) + ", " +
                       FormatFixed(run.style.width_max, 1) + "] pt"};
  });

  std::cout << (report.failures() == 0 ? "all criteria passed"
                                       : std::to_string(report.failures()) + " criteria failed")
            << std::endl;
  return report.failures() == 0 ? 0 : 1;
}

}  // namespace
}  // namespace lrv

int main() {
  try {
    return lrv::Main();
  } catch (const std::exception& e) {
    std::cout << "FAIL  setup: " << e.what() << std::endl;
    return 1;
  }
}
