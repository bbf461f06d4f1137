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

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "funnelselect/arena.hpp"
#include "funnelselect/core.hpp"

namespace fsel::test {

using Key = std::uint64_t;

// Copies a vector into freshly allocated arena cells.
template <typename T>
MemSpan<T> to_arena(Arena<T>& arena, const std::vector<T>& values) {
  MemSpan<T> span = arena.alloc(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) span.store(i, values[i]);
  return span;
}

template <typename T>
std::vector<T> to_vector(MemSpan<T> span) {
  std::vector<T> out(span.size());
  for (std::size_t i = 0; i < span.size(); ++i) out[i] = span.load(i);
  return out;
}

template <typename T>
std::vector<T> sorted_copy(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<Key> random_keys(std::mt19937_64& rng, std::size_t n,
                                    std::uint64_t universe = 0) {
  std::vector<Key> keys(n);
  for (auto& k : keys) k = universe ? rng() % universe : rng() >> 1;
  return keys;
}

}  // namespace fsel::test
