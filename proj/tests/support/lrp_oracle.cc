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

#include "lrp_oracle.h"

#include <algorithm>
#include <cmath>

namespace lrv::oracle {

Mat ToNested(const DenseMatrix& m) {
  Mat out(m.rows(), Vec(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  }
  return out;
}

FcResult ZPlusFc(const Vec& x, const Mat& weights, const Vec& relevance,
                 double eps) {
  const std::size_t in = x.size();
  const std::size_t out = relevance.size();
  FcResult result{Vec(in, 0.0), Mat(in, Vec(out, 0.0))};
  for (std::size_t k = 0; k < out; ++k) {
    double z = 0.0;
    for (std::size_t i = 0; i < in; ++i) {
      z += x[i] * std::max(0.0, weights[i][k]);
    }
    for (std::size_t i = 0; i < in; ++i) {
      const double share = x[i] * std::max(0.0, weights[i][k]) / (z + eps);
      result.messages[i][k] = share * relevance[k];
      result.input_relevance[i] += result.messages[i][k];
    }
  }
  return result;
}

Mat LinearZPlus(const Mat& inputs, const Mat& weights, const Mat& relevance,
                double eps) {
  const std::size_t n = inputs.size();
  const std::size_t k_in = weights.size();
  const std::size_t m_out = weights.empty() ? 0 : weights[0].size();
  Vec x;
  for (const auto& row : inputs) x.insert(x.end(), row.begin(), row.end());
  Vec r;
  for (const auto& row : relevance) r.insert(r.end(), row.begin(), row.end());
  Mat w(n * k_in, Vec(n * m_out, 0.0));
  for (std::size_t node = 0; node < n; ++node) {
    for (std::size_t i = 0; i < k_in; ++i) {
      for (std::size_t j = 0; j < m_out; ++j) {
        w[node * k_in + i][node * m_out + j] = weights[i][j];
      }
    }
  }
  const FcResult fc = ZPlusFc(x, w, r, eps);
  Mat out(n, Vec(k_in));
  for (std::size_t node = 0; node < n; ++node) {
    for (std::size_t i = 0; i < k_in; ++i) {
      out[node][i] = fc.input_relevance[node * k_in + i];
    }
  }
  return out;
}

AdjacencyResult AdjacencyZPlus(const Mat& adjacency, const Mat& inputs,
                               const Mat& relevance, double eps) {
  const std::size_t n = inputs.size();
  const std::size_t f = n ? inputs[0].size() : 0;
  Vec x, r;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < f; ++c) {
      x.push_back(inputs[j][c]);
      r.push_back(relevance[j][c]);
    }
  }
  // Input neuron (j, c) feeds output neuron (i, c) with weight Ã_ij.
  Mat w(n * f, Vec(n * f, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < f; ++c) w[j * f + c][i * f + c] = adjacency[i][j];
    }
  }
  const FcResult fc = ZPlusFc(x, w, r, eps);

  AdjacencyResult out;
  out.input_relevance.assign(n, Vec(f, 0.0));
  out.self_loops.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacency[i][j] > 0.0) out.edges[{i, j}] = 0.0;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < f; ++c) {
      out.input_relevance[j][c] = fc.input_relevance[j * f + c];
      for (std::size_t i = 0; i < n; ++i) {
        const double m = fc.messages[j * f + c][i * f + c];
        if (i == j) {
          out.self_loops[i] += m;
        } else if (adjacency[i][j] > 0.0) {
          out.edges[{std::min(i, j), std::max(i, j)}] += m;
        }
      }
    }
  }
  return out;
}

Mat NormalizeAdjacency(
    std::size_t n,
    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Mat a(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (const auto& [i, j] : edges) {
    a[i][j] = 1.0;
    a[j][i] = 1.0;
  }
  Vec inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (double v : a[i]) deg += v;
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] *= inv_sqrt[i] * inv_sqrt[j];
  }
  return a;
}

namespace {

Mat Product(const Mat& a, const Mat& b) {
  Mat out(a.size(), Vec(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

Mat Rectify(Mat m) {
  for (auto& row : m) {
    for (double& v : row) v = std::max(0.0, v);
  }
  return m;
}

}  // namespace

Vec ReferenceLogits(const ModelParams& params, const Mat& adjacency,
                    const Mat& h0) {
  const Mat h1 = Product(adjacency, Rectify(Product(h0, ToNested(params.w0))));
  const Mat h2 = Product(adjacency, Rectify(Product(h1, ToNested(params.w1))));
  Vec pooled(h2[0].size(), -INFINITY);
  for (const auto& row : h2) {
    for (std::size_t c = 0; c < row.size(); ++c) pooled[c] = std::max(pooled[c], row[c]);
  }
  const Mat logits = Product(Mat{pooled}, ToNested(params.wfc));
  return logits[0];
}

double ReferenceLoss(const Vec& logits, std::size_t gold) {
  long double sum = 0.0L;
  for (double v : logits) sum += std::exp(static_cast<long double>(v));
  return static_cast<double>(std::log(sum) - logits[gold]);
}

}  // namespace lrv::oracle
