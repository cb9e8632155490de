// include/ssd/parallel.h

// Copyright 2026 The ssdscreen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SSD_PARALLEL_H_
#define SSD_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace ssd {

/// Worker cap: SSD_SCREEN_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
int NumThreads();

/// Calls fn(i) for i in [0, n) using up to NumThreads() threads. Each index
/// runs exactly once; callers write results into per-index slots and reduce
/// them afterwards in index order, which keeps sums bit-reproducible.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace ssd

#endif  // SSD_PARALLEL_H_
