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

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "funnelselect/arena.hpp"

namespace fsel {

// Straight insertion sort; the base case of selection.
template <typename T, typename Cmp>
void insertion_sort(MemSpan<T> s, Cmp cmp) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    T key = s.load(i);
    std::size_t j = i;
    while (j > 0) {
      T prev = s.load(j - 1);
      if (!cmp(key, prev)) break;
      s.store(j, prev);
      --j;
    }
    s.store(j, key);
  }
}

// Insertion sort with a binary search for the insertion point. Same data
// movement, O(n lg n) comparisons; used where the comparison count of the
// base case matters.
template <typename T, typename Cmp>
void binary_insertion_sort(MemSpan<T> s, Cmp cmp) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    T key = s.load(i);
    std::size_t lo = 0, hi = i;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (cmp(key, s.load(mid)))
        hi = mid;
      else
        lo = mid + 1;
    }
    for (std::size_t j = i; j > lo; --j) s.store(j, s.load(j - 1));
    s.store(lo, key);
  }
}

// Dutch-flag partition around a pivot value. On return the span holds
// [less | equal | greater] and the result is the pair of boundaries
// (begin of equal, begin of greater). The equal block is never empty when
// the pivot value occurs in the span.
template <typename T, typename Cmp>
std::pair<std::size_t, std::size_t> three_way_partition(MemSpan<T> s, const T& pivot, Cmp cmp) {
  std::size_t lo = 0, mid = 0, hi = s.size();
  while (mid < hi) {
    T x = s.load(mid);
    if (cmp(x, pivot)) {
      s.store(mid, s.load(lo));
      s.store(lo, x);
      ++lo;
      ++mid;
    } else if (cmp(pivot, x)) {
      --hi;
      s.store(mid, s.load(hi));
      s.store(hi, x);
    } else {
      ++mid;
    }
  }
  return {lo, hi};
}

namespace detail {

constexpr std::size_t kSelectBase = 16;

// Median of each group of five, medians gathered into scratch, pivot from a
// recursive select over the medians. Groups are sorted in place, which is
// allowed since any permutation of the window is acceptable.
template <typename T, typename Cmp>
T median_of_medians(Arena<T>& arena, MemSpan<T> s, Cmp cmp);

template <typename T, typename Cmp>
void select_rank_impl(Arena<T>& arena, MemSpan<T> s, std::uint64_t k, Cmp cmp) {
  MemSpan<T> window = s;
  std::uint64_t rank = k;  // 1-based within window
  for (;;) {
    std::size_t n = window.size();
    if (n <= kSelectBase) {
      insertion_sort(window, cmp);
      return;
    }
    T pivot = median_of_medians(arena, window, cmp);
    auto [lo, hi] = three_way_partition(window, pivot, cmp);
    if (rank <= lo) {
      window = window.first(lo);
    } else if (rank > hi) {
      window = window.subspan(hi, n - hi);
      rank -= hi;
    } else {
      return;  // rank falls inside the equal block; layout already final
    }
  }
}

template <typename T, typename Cmp>
T median_of_medians(Arena<T>& arena, MemSpan<T> s, Cmp cmp) {
  std::size_t n = s.size();
  std::size_t groups = (n + 4) / 5;
  auto scope = arena.scope();
  MemSpan<T> medians = arena.alloc(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::size_t begin = 5 * g;
    std::size_t len = begin + 5 <= n ? 5 : n - begin;
    MemSpan<T> group = s.subspan(begin, len);
    insertion_sort(group, cmp);
    medians.store(g, group.load((len - 1) / 2));
  }
  select_rank_impl(arena, medians, (groups + 1) / 2, cmp);
  return medians.load((groups + 1) / 2 - 1);
}

}  // namespace detail

// Deterministic linear-time selection of the k-th smallest (1-based).
// Rearranges s so that s[0..k-1) holds ranks 1..k-1 in arbitrary order,
// s[k-1] is the rank-k element, and s[k..n) holds ranks k+1..n. Duplicates
// are handled by assigning equal elements consecutive ranks.
template <typename T, typename Cmp>
T select_rank(Arena<T>& arena, MemSpan<T> s, std::uint64_t k, Cmp cmp) {
  if (k < 1 || k > s.size())
    throw std::invalid_argument("select rank out of range");
  detail::select_rank_impl(arena, s, k, cmp);
  return s.load(k - 1);
}

// Weighted selection: returns the k-th smallest item for the smallest k
// whose prefix weight sum reaches the target. `weight_of` maps an item to
// its non-negative weight; `cmp` orders items. Items are permuted. Targets
// of zero behave like a target of one (the minimum is returned).
template <typename Item, typename Cmp, typename WeightFn>
Item weighted_select(Arena<Item>& arena, MemSpan<Item> items, std::uint64_t target,
                     Cmp cmp, WeightFn weight_of) {
  using u128 = unsigned __int128;
  u128 total = 0;
  for (std::size_t i = 0; i < items.size(); ++i) total += weight_of(items.load(i));
  if (total < target)
    throw std::invalid_argument("weighted_select: total weight below target");
  if (items.empty())
    throw std::invalid_argument("weighted_select: empty input");

  u128 want = target ? target : 1;
  MemSpan<Item> window = items;
  for (;;) {
    std::size_t n = window.size();
    if (n <= detail::kSelectBase) {
      insertion_sort(window, cmp);
      u128 acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        Item it = window.load(i);
        acc += weight_of(it);
        if (acc >= want) return it;
      }
      return window.load(n - 1);  // unreachable under the precondition
    }
    Item pivot = detail::median_of_medians(arena, window, cmp);
    auto [lo, hi] = three_way_partition(window, pivot, cmp);
    u128 weight_less = 0, weight_equal = 0;
    for (std::size_t i = 0; i < lo; ++i) weight_less += weight_of(window.load(i));
    for (std::size_t i = lo; i < hi; ++i) weight_equal += weight_of(window.load(i));
    if (weight_less >= want) {
      window = window.first(lo);
    } else if (weight_less + weight_equal >= want) {
      return pivot;
    } else {
      want -= weight_less + weight_equal;
      window = window.subspan(hi, n - hi);
    }
  }
}

}  // namespace fsel
