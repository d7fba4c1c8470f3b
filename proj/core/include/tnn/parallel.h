// Copyright 2026 The TNN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TNN_PARALLEL_H_
#define TNN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace tnn {

// Upper bound on worker threads. Defaults to the hardware concurrency,
// capped by the TNN_THREADS environment variable when it is set.
std::size_t max_threads();

// Overrides the thread cap for the current process; 0 restores the default.
void set_max_threads(std::size_t threads);

// Runs body(begin, end) over contiguous chunks of [0, count). Chunks are
// disjoint, so callers that write only to per-index outputs get results
// independent of the thread count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace tnn

#endif  // TNN_PARALLEL_H_
