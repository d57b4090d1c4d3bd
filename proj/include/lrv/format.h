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

#ifndef LRV_FORMAT_H_
#define LRV_FORMAT_H_

#include <string>

namespace lrv {

// Fixed-point text for `value` with `decimals` digits; never depends on the
// C locale and never prints "-0.00".
std::string FormatFixed(double value, int decimals);

}  // namespace lrv

#endif  // LRV_FORMAT_H_
