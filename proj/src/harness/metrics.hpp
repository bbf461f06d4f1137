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
#include <utility>

#include "funnelselect/trace.hpp"
#include "funnelselect/workspace.hpp"

namespace fsel::harness {

struct RunMetrics {
  std::uint64_t misses = 0;
  std::uint64_t element_accesses = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t arena_high_water = 0;  // element + rank arena cells
};

// Runs `fn(workspace)` against a fresh LRU model with the given geometry
// and reports the counters. `fn` must route all element data through the
// workspace arenas.
template <typename T, typename Fn>
auto run_traced(std::size_t element_capacity, std::size_t rank_capacity,
                std::uint64_t cache_elems, std::uint64_t block_elems, Fn&& fn)
    -> std::pair<decltype(fn(std::declval<Workspace<T>&>())), RunMetrics> {
  CacheModel cache(cache_elems, block_elems);
  Workspace<T> ws(element_capacity, rank_capacity, &cache);
  auto result = fn(ws);
  RunMetrics metrics;
  metrics.misses = cache.misses();
  metrics.element_accesses = cache.element_accesses();
  metrics.comparisons = ws.comparisons.count;
  metrics.arena_high_water = ws.elements.high_water() + ws.ranks.high_water();
  return {std::move(result), metrics};
}

// Untraced twin of run_traced: no cache model attached, miss count zero.
template <typename T, typename Fn>
auto run_untraced(std::size_t element_capacity, std::size_t rank_capacity, Fn&& fn)
    -> std::pair<decltype(fn(std::declval<Workspace<T>&>())), RunMetrics> {
  Workspace<T> ws(element_capacity, rank_capacity);
  auto result = fn(ws);
  RunMetrics metrics;
  metrics.comparisons = ws.comparisons.count;
  metrics.arena_high_water = ws.elements.high_water() + ws.ranks.high_water();
  return {std::move(result), metrics};
}

}  // namespace fsel::harness
