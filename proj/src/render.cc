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

#include "lrv/render.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrv/format.h"

namespace lrv {
namespace {

constexpr double kTokenSpacing = 90.0;
constexpr double kMargin = 30.0;
constexpr double kArcUnitHeight = 28.0;

double SumOf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// 100 * values / total; all zeros when total is 0.
std::vector<double> Percentages(const std::vector<double>& values,
                                double total) {
  std::vector<double> out(values.size(), 0.0);
  if (!(total > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = 100.0 * values[i] / total;
  }
  return out;
}

// White mixed with red in proportion to `percent`, like red!percent.
std::string RedTint(double percent) {
  const double p = std::clamp(percent, 0.0, 100.0) / 100.0;
  const int other = static_cast<int>(std::lround(255.0 * (1.0 - p)));
  static const char* kHex = "0123456789abcdef";
  std::string out = "#ff";
  for (int k = 0; k < 2; ++k) {
    out += kHex[other / 16];
    out += kHex[other % 16];
  }
  return out;
}

std::string DotEscape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string LatexEscape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      case '\\': out += "\\textbackslash{}"; break;
      default: out += c;
    }
  }
  return out;
}

double TokenX(std::size_t i) {
  return kMargin + kTokenSpacing * (static_cast<double>(i) + 0.5);
}

}  // namespace

double ArcWidth(double percent, const RenderStyle& style) {
  const double raw = style.width_base + style.width_scale * percent / 100.0;
  return std::clamp(raw, style.width_base, style.width_max);
}

std::array<LayerFigure, 3> NormalizeLayers(const RelevanceTrace& trace,
                                           const SentenceGraph& graph,
                                           const RenderStyle& style) {
  if (trace.num_nodes() != graph.num_nodes()) {
    throw std::invalid_argument("NormalizeLayers: trace has " +
                                std::to_string(trace.num_nodes()) +
                                " nodes, sentence '" + graph.id + "' has " +
                                std::to_string(graph.num_nodes()));
  }
  std::array<LayerFigure, 3> figures;
  for (std::size_t l = 0; l < figures.size(); ++l) {
    const LayerRelevance& layer = trace.layers[l];
    LayerFigure& fig = figures[l];
    fig.sentence_id = graph.id;
    fig.tag = layer.tag;
    fig.tokens = graph.tokens;
    fig.style = style;
    const double total = SumOf(layer.nodes);
    fig.node_percent = Percentages(layer.nodes, total);
    fig.degenerate = !(total > 0.0);

    double edge_total = 0.0;
    for (const auto& [edge, value] : layer.edges) edge_total += value;
    for (const auto& e : graph.edges) {
      FigureArc arc;
      arc.head = e.head;
      arc.dependent = e.dependent;
      arc.label = e.label;
      arc.weighted = layer.has_edges;
      if (layer.has_edges && edge_total > 0.0) {
        const auto key = std::pair(std::min(e.head, e.dependent),
                                   std::max(e.head, e.dependent));
        if (auto it = layer.edges.find(key); it != layer.edges.end()) {
          arc.percent = 100.0 * it->second / edge_total;
        }
      }
      arc.width = arc.weighted ? ArcWidth(arc.percent, style) : style.width_base;
      fig.arcs.push_back(std::move(arc));
    }
    fig.caption = "sentence " + graph.id + ", layer " + layer.tag +
                  ", predicted " +
                  std::string(LabelName(static_cast<Label>(trace.chosen_class))) +
                  ", gold " + std::string(LabelName(graph.gold));
  }
  return figures;
}

std::string XmlEscape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string EmitDot(const LayerFigure& figure) {
  std::ostringstream out;
  out << "digraph \"" << DotEscape(figure.sentence_id + "." + figure.tag)
      << "\" {\n";
  out << "  graph [rankdir=LR, label=\"" << DotEscape(figure.caption)
      << "\"];\n";
  out << "  node [shape=box, style=filled, fontname=\"Helvetica\"];\n";
  out << "  edge [fontname=\"Helvetica\", fontsize=10];\n";
  for (std::size_t i = 0; i < figure.tokens.size(); ++i) {
    out << "  n" << i << " [label=\"" << DotEscape(figure.tokens[i]) << "\\n("
        << FormatFixed(figure.node_percent[i], 2) << ")\", fillcolor=\""
        << RedTint(figure.node_percent[i]) << "\"];\n";
  }
  if (figure.tokens.size() > 1) {
    // Keep the surface order left to right.
    out << "  { rank=same;";
    for (std::size_t i = 0; i < figure.tokens.size(); ++i) out << " n" << i << ";";
    out << " }\n";
    out << "  ";
    for (std::size_t i = 0; i < figure.tokens.size(); ++i) {
      out << (i ? " -> " : "") << "n" << i;
    }
    out << " [style=invis];\n";
  }
  for (const auto& arc : figure.arcs) {
    out << "  n" << arc.head << " -> n" << arc.dependent << " [label=\""
        << DotEscape(arc.label) << "\", penwidth=" << FormatFixed(arc.width, 3)
        << ", constraint=false];\n";
  }
  out << "}\n";
  return out.str();
}

std::string EmitSvg(const LayerFigure& figure) {
  const std::size_t n = figure.tokens.size();
  std::size_t max_span = 1;
  for (const auto& arc : figure.arcs) {
    max_span = std::max(max_span, arc.head > arc.dependent
                                      ? arc.head - arc.dependent
                                      : arc.dependent - arc.head);
  }
  const double width = 2.0 * kMargin + kTokenSpacing * static_cast<double>(n);
  const double baseline = kMargin + kArcUnitHeight * static_cast<double>(max_span) + 20.0;
  const double height = baseline + 70.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << FormatFixed(width, 1) << "\" height=\"" << FormatFixed(height, 1)
      << "\" viewBox=\"0 0 " << FormatFixed(width, 1) << " "
      << FormatFixed(height, 1) << "\">\n";
  out << "  <title>" << XmlEscape(figure.caption) << "</title>\n";
  out << "  <defs>\n"
         "    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" "
         "refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
         "orient=\"auto-start-reverse\">\n"
         "      <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333333\"/>\n"
         "    </marker>\n"
         "  </defs>\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << FormatFixed(width, 1)
      << "\" height=\"" << FormatFixed(height, 1) << "\" fill=\"#ffffff\"/>\n";

  for (const auto& arc : figure.arcs) {
    const double x1 = TokenX(arc.head);
    const double x2 = TokenX(arc.dependent);
    const double span = std::abs(static_cast<double>(arc.head) -
                                 static_cast<double>(arc.dependent));
    const double top = baseline - 18.0 - kArcUnitHeight * span;
    const double y0 = baseline - 18.0;
    out << "  <path d=\"M " << FormatFixed(x1, 1) << " " << FormatFixed(y0, 1)
        << " C " << FormatFixed(x1, 1) << " " << FormatFixed(top, 1) << " "
        << FormatFixed(x2, 1) << " " << FormatFixed(top, 1) << " "
        << FormatFixed(x2, 1) << " " << FormatFixed(y0, 1)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\""
        << FormatFixed(arc.width, 3) << "\" marker-end=\"url(#arrow)\"/>\n";
    const double label_y = baseline - 18.0 - 0.75 * kArcUnitHeight * span - 4.0;
    out << "  <text x=\"" << FormatFixed(0.5 * (x1 + x2), 1) << "\" y=\""
        << FormatFixed(label_y, 1)
        << "\" font-family=\"Helvetica\" font-size=\"10\" "
           "text-anchor=\"middle\">"
        << XmlEscape(arc.label) << "</text>\n";
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double x = TokenX(i);
    out << "  <rect x=\"" << FormatFixed(x - 0.45 * kTokenSpacing, 1)
        << "\" y=\"" << FormatFixed(baseline - 14.0, 1) << "\" width=\""
        << FormatFixed(0.9 * kTokenSpacing, 1)
        << "\" height=\"22.0\" fill=\"" << RedTint(figure.node_percent[i])
        << "\" stroke=\"#999999\"/>\n";
    out << "  <text x=\"" << FormatFixed(x, 1) << "\" y=\""
        << FormatFixed(baseline + 2.0, 1)
        << "\" font-family=\"Helvetica\" font-size=\"13\" "
           "text-anchor=\"middle\">"
        << XmlEscape(figure.tokens[i]) << "</text>\n";
    out << "  <text x=\"" << FormatFixed(x, 1) << "\" y=\""
        << FormatFixed(baseline + 26.0, 1)
        << "\" font-family=\"Helvetica\" font-size=\"11\" "
           "text-anchor=\"middle\">("
        << FormatFixed(figure.node_percent[i], 2) << ")</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string EmitLatex(const LayerFigure& figure) {
  std::ostringstream out;
  out << "\\documentclass{standalone}\n"
         "\\usepackage{tikz-dependency}\n"
         "\\begin{document}\n";
  out << "% " << LatexEscape(figure.caption) << "\n";
  out << "\\begin{dependency}[scale=.7, transform shape]\n";
  out << "\\begin{deptext}\n";
  for (std::size_t i = 0; i < figure.tokens.size(); ++i) {
    out << (i ? " \\& " : "") << "|[top color=red!"
        << FormatFixed(figure.node_percent[i], 2) << "]|"
        << LatexEscape(figure.tokens[i]);
  }
  out << "\\\\\n";
  for (std::size_t i = 0; i < figure.tokens.size(); ++i) {
    out << (i ? " \\& " : "") << "(" << FormatFixed(figure.node_percent[i], 2)
        << ")";
  }
  out << "\\\\\n";
  out << "\\end{deptext}\n";
  for (const auto& arc : figure.arcs) {
    out << "\\depedge";
    if (arc.weighted) out << "[line width=" << FormatFixed(arc.width, 3) << "pt]";
    out << "{" << arc.head + 1 << "}{" << arc.dependent + 1 << "}{"
        << LatexEscape(arc.label) << "}\n";
  }
  out << "\\end{dependency}\n";
  out << "\\end{document}\n";
  return out.str();
}

std::string WriteConllu(const std::vector<SentenceGraph>& graphs) {
  std::ostringstream out;
  for (const auto& g : graphs) {
    g.Validate();
    const std::size_t n = g.num_nodes();
    std::vector<const DependencyEdge*> head_of(n, nullptr);
    for (const auto& e : g.edges) {
      if (head_of[e.dependent]) {
        throw std::invalid_argument("WriteConllu: token " +
                                    std::to_string(e.dependent) +
                                    " of sentence '" + g.id +
                                    "' has two heads");
      }
      head_of[e.dependent] = &e;
    }
    out << "# sent_id = " << g.id << "\n";
    out << "# label = " << LabelName(g.gold) << "\n";
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& form = g.tokens[i];
      if (form.find_first_of("\t\n\r") != std::string::npos) {
        throw std::invalid_argument("WriteConllu: token '" + form +
                                    "' contains a tab or newline");
      }
      const DependencyEdge* e = head_of[i];
      const std::string deprel =
          e ? (e->label.empty() ? std::string("_") : e->label) : "root";
      out << i + 1 << '\t' << form << "\t_\t_\t_\t_\t"
          << (e ? e->head + 1 : 0) << '\t' << deprel << "\t_\t_\n";
    }
    out << "\n";
  }
  return out.str();
}

std::string RenderIndexHtml(const std::vector<std::string>& files) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\">"
         "<title>Layerwise relevance figures</title></head>\n<body>\n"
         "<h1>Layerwise relevance figures</h1>\n<ul>\n";
  for (const auto& f : files) {
    out << "<li><a href=\"" << XmlEscape(f) << "\">" << XmlEscape(f)
        << "</a></li>\n";
  }
  out << "</ul>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace lrv
