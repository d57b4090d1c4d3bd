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

// JSON trace documents. The field names are a stable format; see
// docs/trace_format.md.

#ifndef LRV_TRACE_IO_H_
#define LRV_TRACE_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lrv/corpus.h"
#include "lrv/relevance.h"

namespace lrv {

inline constexpr int kTraceFormatVersion = 1;

// Pretty-printed JSON followed by a newline. Byte-identical for identical
// inputs.
std::string WriteTraceJson(const RelevanceTrace& trace,
                           const SentenceGraph& graph, std::uint64_t seed);

struct TraceDocument {
  std::string sentence_id;
  std::uint64_t seed = 0;
  std::vector<std::string> tokens;
  std::string gold_label;
  // Contribution maps are not serialized; `map` members stay empty.
  RelevanceTrace trace;
};

// Throws ParseError on malformed documents or a version mismatch.
TraceDocument ReadTraceJson(std::string_view text);

}  // namespace lrv

#endif  // LRV_TRACE_IO_H_
