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

// Layerwise relevance figures: one dependency-arc drawing per checkpoint,
// nodes shaded by their share of the layer's relevance and arcs widened by
// their share of the relevance carried across the adjacency.

#ifndef LRV_RENDER_H_
#define LRV_RENDER_H_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "lrv/corpus.h"
#include "lrv/relevance.h"

namespace lrv {

struct RenderStyle {
  double width_base = 0.5;   // pt, also the width of unweighted arcs
  double width_scale = 5.8;  // pt per 100% of edge relevance
  double width_max = 3.0;    // pt
};

// base + scale * percent / 100, clamped to [base, max].
double ArcWidth(double percent, const RenderStyle& style);

struct FigureArc {
  std::size_t head = 0;
  std::size_t dependent = 0;
  std::string label;
  double percent = 0.0;  // share of the layer's edge relevance
  bool weighted = false;
  double width = 0.0;
};

struct LayerFigure {
  std::string sentence_id;
  std::string tag;  // output, gcn2 or gcn1
  std::vector<std::string> tokens;
  std::vector<double> node_percent;  // sums to 100 unless degenerate
  std::vector<FigureArc> arcs;       // one per dependency edge
  RenderStyle style;
  bool degenerate = false;           // layer carried no relevance
  std::string caption;
};

// Percentages per layer. The "output" figure draws every arc at the base
// width since no adjacency projection lies above it.
std::array<LayerFigure, 3> NormalizeLayers(const RelevanceTrace& trace,
                                           const SentenceGraph& graph,
                                           const RenderStyle& style = {});

std::string EmitDot(const LayerFigure& figure);
std::string EmitSvg(const LayerFigure& figure);
// Standalone LaTeX document using tikz-dependency.
std::string EmitLatex(const LayerFigure& figure);

// The CoNLL-U subset read by ParseConllu. Throws std::invalid_argument if a
// token has two heads or contains a tab or newline.
std::string WriteConllu(const std::vector<SentenceGraph>& graphs);

// HTML page linking every emitted figure file (paths relative to the page).
std::string RenderIndexHtml(const std::vector<std::string>& files);

std::string XmlEscape(std::string_view text);

}  // namespace lrv

#endif  // LRV_RENDER_H_
