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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lrv/corpus.h"
#include "lrv/experiments.h"
#include "lrv/format.h"
#include "lrv/metrics.h"
#include "lrv/model.h"
#include "lrv/relevance.h"
#include "lrv/render.h"
#include "lrv/run_config.h"
#include "lrv/trace_io.h"

namespace lrv::cli {
namespace {

namespace fs = std::filesystem;

// Raised when a computed result breaks an invariant the library promises.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;
};

struct ExplainFlags {
  std::vector<std::string> ids;
  bool all = false;
  std::string split = "test";
  std::string render;
};

void AddCommonFlags(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--config", flags.config_path, "key = value run config")
      ->required();
  cmd.add_option("--seed", flags.seed, "Override the training seed");
  cmd.add_option("--out", flags.out_dir, "Override the output directory");
  cmd.add_option("--set", flags.overrides, "Extra key=value override")
      ->take_all();
}

RunConfig ResolveConfig(const CommonFlags& flags) {
  RunConfig config = LoadRunConfig(flags.config_path);
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    config.Set(kv.substr(0, eq), kv.substr(eq + 1), fs::current_path());
  }
  if (flags.seed) config.train.seed = *flags.seed;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  config.Validate();
  if (config.manifest.empty()) throw ConfigError("config sets no manifest");
  if (config.embeddings.empty()) throw ConfigError("config sets no embeddings");
  return config;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string Scientific(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

struct Inputs {
  LabeledDataset dataset;
  EmbeddingTable table;
};

Inputs LoadInputs(const RunConfig& config) {
  LabeledDataset dataset = LoadDataset(config.manifest);
  if (!fs::exists(config.embeddings)) {
    throw std::runtime_error("embeddings file not found: " +
                             config.embeddings.string());
  }
  EmbeddingTable table =
      LoadEmbeddingsFile(config.embeddings, dataset.Vocabulary());
  return {std::move(dataset), std::move(table)};
}

ModelParams LoadModel(const RunConfig& config, const EmbeddingTable& table) {
  const fs::path path = config.CheckpointPath();
  if (!fs::exists(path)) {
    throw CheckpointError("checkpoint not found: " + path.string() +
                          " (run `lrv train` first)");
  }
  ModelParams params = LoadCheckpoint(path);
  CheckCompatible(params, table);
  return params;
}

void PrepareOutDir(const RunConfig& config, const std::string& command) {
  fs::create_directories(config.out_dir);
  WriteText(config.out_dir / (command + ".config.txt"),
            "# lrv " + command + "\n" + config.Describe());
}

int CmdTrain(const RunConfig& config, std::ostream& out) {
  const Inputs in = LoadInputs(config);
  if (in.dataset.train.empty()) throw std::runtime_error("train split is empty");
  PrepareOutDir(config, "train");

  const TrainResult result = Train(in.dataset, in.table, config.train);
  SaveCheckpoint(config.CheckpointPath(), result.params);

  std::string log = "epoch,train_loss,dev_weighted_f1\n";
  for (const auto& e : result.epochs) {
    log += std::to_string(e.epoch) + "," + FormatFixed(e.train_loss, 6) + "," +
           FormatFixed(e.dev_weighted_f1, 6) + "\n";
  }
  WriteText(config.out_dir / "train_log.csv", log);

  std::string steps = "epoch,batch,loss,wfc_min\n";
  for (const auto& s : result.steps) {
    steps += std::to_string(s.epoch) + "," + std::to_string(s.batch) + "," +
             FormatFixed(s.loss, 6) + "," + FormatFixed(s.wfc_min, 9) + "\n";
  }
  WriteText(config.out_dir / "steps.csv", steps);

  const bool clamped = std::all_of(
      result.steps.begin(), result.steps.end(),
      [](const StepRecord& s) { return s.wfc_min >= 0.0; });
  if (!clamped) throw InvariantError("Wfc went negative after a step");

  out << "seed " << config.train.seed << ", " << in.dataset.train.size()
      << " train / " << in.dataset.dev.size() << " dev sentences, "
      << result.epochs.size() << " epochs\n";
  if (!result.epochs.empty()) {
    out << "best epoch " << result.best_epoch << ", dev weighted F1 "
        << FormatFixed(result.epochs[result.best_epoch - 1].dev_weighted_f1, 4)
        << "\n";
  }
  out << "checkpoint " << config.CheckpointPath().string() << "\n";
  return kExitOk;
}

int CmdEval(const RunConfig& config, std::ostream& out) {
  const Inputs in = LoadInputs(config);
  if (in.dataset.test.empty()) throw std::runtime_error("test split is empty");
  const ModelParams params = LoadModel(config, in.table);
  PrepareOutDir(config, "eval");

  std::vector<std::size_t> gold;
  for (const auto& g : in.dataset.test) gold.push_back(LabelIndex(g.gold));
  const auto predicted = PredictAll(params, in.dataset.test, in.table);
  const ClassificationReport report = Classify(gold, predicted, kNumLabels);

  std::string text = "# lrv eval, seed " + std::to_string(params.shape.seed) +
                     ", " + std::to_string(gold.size()) + " test sentences\n";
  text += "class,precision,recall,f1,support\n";
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const auto& s = report.per_class[c];
    text += std::string(LabelName(static_cast<Label>(c))) + "," +
            FormatFixed(s.precision, 4) + "," + FormatFixed(s.recall, 4) + "," +
            FormatFixed(s.f1, 4) + "," + std::to_string(s.support) + "\n";
  }
  text += "weighted_f1," + FormatFixed(report.weighted_f1, 4) + "\n";
  text += "accuracy," + FormatFixed(report.accuracy, 4) + "\n";
  WriteText(config.out_dir / "eval_report.txt", text);

  out << "test weighted F1 " << FormatFixed(report.weighted_f1, 4) << "\n";
  return kExitOk;
}

const std::vector<SentenceGraph>& PickSplit(const LabeledDataset& dataset,
                                            const std::string& name) {
  if (name == "train") return dataset.train;
  if (name == "dev") return dataset.dev;
  if (name == "test") return dataset.test;
  throw ConfigError("unknown split '" + name + "'");
}

std::set<std::string> ParseFormats(const std::string& list) {
  std::set<std::string> formats;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item != "dot" && item != "svg" && item != "tex") {
      throw ConfigError("--render: unknown format '" + item +
                        "' (expected dot, svg, tex)");
    }
    formats.insert(item);
  }
  return formats;
}

int CmdExplain(const RunConfig& config, const ExplainFlags& flags,
               std::ostream& out, std::ostream& err) {
  if (flags.all == !flags.ids.empty()) {
    throw ConfigError("explain needs exactly one of --id or --all");
  }
  const auto formats = ParseFormats(flags.render);
  const Inputs in = LoadInputs(config);
  const ModelParams params = LoadModel(config, in.table);
  const auto& split = PickSplit(in.dataset, flags.split);

  std::vector<const SentenceGraph*> chosen;
  if (flags.all) {
    for (const auto& g : split) chosen.push_back(&g);
  } else {
    std::map<std::string, const SentenceGraph*> by_id;
    for (const auto& g : split) by_id[g.id] = &g;
    for (const auto& id : flags.ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw std::invalid_argument("unknown sentence id '" + id + "' in " +
                                    flags.split + " split");
      }
      chosen.push_back(it->second);
    }
  }

  PrepareOutDir(config, "explain");
  const fs::path trace_dir = config.out_dir / "traces";
  const fs::path figure_dir = config.out_dir / "figures";
  fs::create_directories(trace_dir);
  if (!formats.empty()) fs::create_directories(figure_dir);

  std::vector<std::string> figure_files;
  std::size_t breaches = 0;
  for (const SentenceGraph* g : chosen) {
    const RelevanceTrace trace = Explain(params, *g, in.table);
    WriteText(trace_dir / (g->id + ".json"),
              WriteTraceJson(trace, *g, params.shape.seed));
    const bool ok = ConservationHolds(trace, config.conservation_rel_tol,
                                      config.conservation_abs_tol);
    if (!ok) ++breaches;
    out << g->id << " " << LabelName(static_cast<Label>(trace.chosen_class))
        << " relevance " << FormatFixed(trace.output_relevance, 6)
        << " max relative residual " << Scientific(MaxRelativeResidual(trace))
        << (trace.degenerate ? " (degenerate)" : "") << (ok ? "" : " BREACH")
        << "\n";
    if (formats.empty()) continue;
    for (const auto& figure : NormalizeLayers(trace, *g, config.style)) {
      const std::string stem = g->id + "." + figure.tag;
      if (formats.count("dot")) {
        WriteText(figure_dir / (stem + ".dot"), EmitDot(figure));
        figure_files.push_back(stem + ".dot");
      }
      if (formats.count("svg")) {
        WriteText(figure_dir / (stem + ".svg"), EmitSvg(figure));
        figure_files.push_back(stem + ".svg");
      }
      if (formats.count("tex")) {
        WriteText(figure_dir / (stem + ".tex"), EmitLatex(figure));
        figure_files.push_back(stem + ".tex");
      }
    }
  }
  if (!formats.empty()) {
    WriteText(figure_dir / "index.html", RenderIndexHtml(figure_files));
  }
  out << chosen.size() << " trace(s) in " << trace_dir.string() << "\n";
  if (breaches) {
    err << "conservation breached for " << breaches << " sentence(s)\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int CmdPerturb(const RunConfig& config, std::ostream& out) {
  const Inputs in = LoadInputs(config);
  if (in.dataset.test.empty()) throw std::runtime_error("test split is empty");
  const ModelParams params = LoadModel(config, in.table);
  PrepareOutDir(config, "perturb");

  const PerturbationResult result =
      RunPerturbation(params, in.dataset.test, in.table, DefaultFractions());
  WriteCurvesCsv(config.out_dir / "perturbation.csv", result.most,
                 result.least);
  WriteText(config.out_dir / "perturbation_report.txt",
            PerturbationReport(result, params.shape.seed,
                               in.dataset.test.size()));
  out << "mean F1 most-first " << FormatFixed(result.most.MeanPerturbedF1(), 4)
      << ", least-first " << FormatFixed(result.least.MeanPerturbedF1(), 4)
      << "\n";
  out << "AUC gap (least - most) " << FormatFixed(result.AreaGap(), 4) << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Layerwise relevance for GCN sentence classifiers"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, explain_flags, perturb_flags;
  ExplainFlags explain;
  CLI::App* train = app.add_subcommand("train", "Train and write a checkpoint");
  CLI::App* eval = app.add_subcommand("eval", "Weighted F1 on the test split");
  CLI::App* expl = app.add_subcommand("explain", "Write relevance traces");
  CLI::App* perturb =
      app.add_subcommand("perturb", "Edge-deletion perturbation curves");
  AddCommonFlags(*train, train_flags);
  AddCommonFlags(*eval, eval_flags);
  AddCommonFlags(*expl, explain_flags);
  AddCommonFlags(*perturb, perturb_flags);
  expl->add_option("--id", explain.ids, "Sentence id (repeatable)");
  expl->add_flag("--all", explain.all, "Every sentence of the split");
  expl->add_option("--split", explain.split, "train, dev or test")
      ->capture_default_str();
  expl->add_option("--render", explain.render,
                   "Comma-separated figure formats: dot,svg,tex");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (train->parsed()) return CmdTrain(ResolveConfig(train_flags), out);
    if (eval->parsed()) return CmdEval(ResolveConfig(eval_flags), out);
    if (expl->parsed()) {
      return CmdExplain(ResolveConfig(explain_flags), explain, out, err);
    }
    return CmdPerturb(ResolveConfig(perturb_flags), out);
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ContractViolation& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }
}

}  // namespace lrv::cli
