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

#include "lrv/trace_io.h"

#include "json.hpp"

namespace lrv {

using nlohmann::ordered_json;

std::string WriteTraceJson(const RelevanceTrace& trace,
                           const SentenceGraph& graph, std::uint64_t seed) {
  if (trace.num_nodes() != graph.num_nodes()) {
    throw std::invalid_argument("WriteTraceJson: trace has " +
                                std::to_string(trace.num_nodes()) +
                                " nodes, sentence '" + graph.id + "' has " +
                                std::to_string(graph.num_nodes()));
  }
  ordered_json doc;
  doc["format"] = "lrv-trace";
  doc["version"] = kTraceFormatVersion;
  doc["seed"] = seed;
  doc["sentence_id"] = graph.id;
  doc["tokens"] = graph.tokens;
  doc["gold_label"] = std::string(LabelName(graph.gold));
  doc["chosen_class"] = trace.chosen_class;
  doc["chosen_label"] =
      std::string(LabelName(static_cast<Label>(trace.chosen_class)));
  doc["output_relevance"] = trace.output_relevance;
  doc["degenerate"] = trace.degenerate;

  ordered_json layers = ordered_json::array();
  for (const auto& layer : trace.layers) {
    ordered_json l;
    l["tag"] = layer.tag;
    l["node_relevance"] = layer.nodes;
    l["residual"] = layer.residual;
    if (layer.has_edges) {
      ordered_json edges = ordered_json::array();
      for (const auto& [edge, value] : layer.edges) {
        edges.push_back(ordered_json::array({edge.first, edge.second, value}));
      }
      l["edges"] = std::move(edges);
      l["self_loops"] = layer.self_loops;
      l["edge_residual"] = layer.edge_residual;
    }
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

TraceDocument ReadTraceJson(std::string_view text) {
  TraceDocument out;
  try {
    const auto doc = ordered_json::parse(text);
    if (doc.at("format").get<std::string>() != "lrv-trace" ||
        doc.at("version").get<int>() != kTraceFormatVersion) {
      throw ParseError("unsupported trace format or version", 0);
    }
    out.sentence_id = doc.at("sentence_id").get<std::string>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.tokens = doc.at("tokens").get<std::vector<std::string>>();
    out.gold_label = doc.at("gold_label").get<std::string>();
    RelevanceTrace& t = out.trace;
    t.chosen_class = doc.at("chosen_class").get<std::size_t>();
    t.output_relevance = doc.at("output_relevance").get<double>();
    t.degenerate = doc.at("degenerate").get<bool>();
    const auto& layers = doc.at("layers");
    if (layers.size() != t.layers.size()) {
      throw ParseError("trace must have exactly 3 layers", 0);
    }
    for (std::size_t l = 0; l < t.layers.size(); ++l) {
      LayerRelevance& layer = t.layers[l];
      const auto& src = layers[l];
      layer.tag = src.at("tag").get<std::string>();
      layer.nodes = src.at("node_relevance").get<std::vector<double>>();
      layer.residual = src.at("residual").get<double>();
      if (src.contains("edges")) {
        layer.has_edges = true;
        for (const auto& e : src.at("edges")) {
          layer.edges[{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()}] =
              e.at(2).get<double>();
        }
        layer.self_loops = src.at("self_loops").get<std::vector<double>>();
        layer.edge_residual = src.at("edge_residual").get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed trace document: ") + e.what(), 0);
  }
  return out;
}

}  // namespace lrv
