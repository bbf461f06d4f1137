/*
 * Copyright 2026 the funnelsel authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

#include "funnelselect/arena.hpp"
#include "funnelselect/core.hpp"
#include "funnelselect/trace.hpp"

namespace fsel {

// Everything one run owns: an element arena, a rank arena (rank and gap
// arrays are element traffic too), and the comparison tally. Both arenas
// report to the same sink from disjoint address ranges. Never shared
// between concurrent runs.
template <typename T>
struct Workspace {
  static constexpr addr_t kRankArenaBase = addr_t(1) << 40;

  Workspace(std::size_t element_capacity, std::size_t rank_capacity,
            CacheModel* cache = nullptr, TraceWriter* writer = nullptr)
      : sink(cache, writer),
        traced(cache != nullptr || writer != nullptr),
        elements(element_capacity, traced ? &sink : nullptr, 0),
        ranks(rank_capacity, traced ? &sink : nullptr, kRankArenaBase) {}

  // Capacity that covers multiselect over n elements with q queries:
  // input copy plus per-level pivot array, 2*delta-capacity bucket slots
  // (about 4n), partitioner scratch and funnelsort scratch, with the
  // recursive mass halving per level.
  static std::size_t element_capacity_for(std::uint64_t n) {
    return static_cast<std::size_t>(16 * n + 4096);
  }

  static std::size_t rank_capacity_for(std::uint64_t q) {
    return static_cast<std::size_t>(4 * q + 1024);
  }

  TraceSink sink;
  bool traced;
  Arena<T> elements;
  Arena<rank_t> ranks;
  ComparisonCounter comparisons;
};

}  // namespace fsel
