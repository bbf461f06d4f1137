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
#include <stdexcept>
#include <vector>

#include "funnelselect/arena.hpp"
#include "funnelselect/intmath.hpp"
#include "funnelselect/partitioner.hpp"
#include "funnelselect/select.hpp"

namespace fsel {

// Result of multi_partition: k buckets in logical (pivot-interval) order
// plus the k-1 separating pivots. Bucket regions are 2*delta-capacity slots
// carved from one contiguous arena block; the logical ordering lives in the
// OutputBuckets metadata. Every element of bucket i satisfies
// pivots[i-1] <= x <= pivots[i].
template <typename T>
struct MultiPartitionResult {
  OutputBuckets<T> buckets;
  MemSpan<T> pivot_store;  // capacity for the slot count; first k-1 are live
  std::uint64_t k = 1;

  MemSpan<const T> pivots() const { return MemSpan<const T>(pivot_store.first(k - 1)); }
};

// Test/instrumentation hook; called after each batch has been distributed
// and all overflowing buckets split.
struct MultiPartitionObserver {
  virtual ~MultiPartitionObserver() = default;
  virtual void on_batch(std::uint64_t batch_index, const std::vector<std::uint64_t>& sizes) = 0;
};

namespace detail {

// Split one overflowing bucket: its median becomes a pivot, the lower half
// stays in the old slot, the upper half moves to the next free slot.
template <typename T, typename Cmp>
void split_bucket(Arena<T>& arena, OutputBuckets<T>& buckets, MemSpan<T> pivot_store,
                  std::uint64_t& k, std::uint64_t& next_free_slot, MemSpan<T> slot_area,
                  std::uint64_t slot_capacity, std::uint64_t slot_count,
                  std::size_t logical, Cmp cmp) {
  std::uint64_t s = buckets.fill(logical);
  std::uint64_t m = (s + 1) / 2;
  MemSpan<T> content = buckets.content(logical);
  T pivot = select_rank(arena, content, m, cmp);

  if (next_free_slot >= slot_count)
    throw std::logic_error("multi_partition: bucket slots exhausted");
  MemSpan<T> fresh = slot_area.subspan(
      static_cast<std::size_t>(next_free_slot * slot_capacity),
      static_cast<std::size_t>(slot_capacity));
  ++next_free_slot;
  for (std::uint64_t i = m; i < s; ++i)
    fresh.store(static_cast<std::size_t>(i - m), content.load(static_cast<std::size_t>(i)));

  buckets.set_fill(logical, m - 1);
  buckets.insert(logical + 1, fresh, s - m);

  // Insert the pivot at logical position; later pivots shift right.
  for (std::uint64_t j = k - 1; j > logical; --j)
    pivot_store.store(static_cast<std::size_t>(j),
                      pivot_store.load(static_cast<std::size_t>(j - 1)));
  pivot_store.store(logical, pivot);
  ++k;
}

template <typename T, typename Cmp>
MultiPartitionResult<T> multi_partition_impl(Arena<T>& arena, MemSpan<const T> input,
                                             std::uint64_t delta, int d, Cmp cmp,
                                             MultiPartitionObserver* observer) {
  std::uint64_t n = input.size();
  std::uint64_t slot_count = delta > 0 ? (2 * n) / delta : 0;
  if (slot_count < 1) slot_count = 1;
  std::uint64_t slot_capacity = 2 * delta;

  MultiPartitionResult<T> result;
  result.pivot_store = arena.alloc(static_cast<std::size_t>(slot_count));
  MemSpan<T> slot_area = arena.alloc(static_cast<std::size_t>(slot_count * slot_capacity));

  result.buckets.add(slot_area.subspan(0, static_cast<std::size_t>(slot_capacity)), 0);
  std::uint64_t next_free_slot = 1;
  result.k = 1;

  std::uint64_t batch_index = 0;
  for (std::uint64_t begin = 0; begin < n || (n == 0 && begin == 0); begin += delta) {
    std::uint64_t len = begin + delta <= n ? delta : n - begin;

#ifndef NDEBUG
    for (std::size_t i = 0; i < result.buckets.count(); ++i)
      assert(result.buckets.fill(i) <= delta);
#endif

    {
      // The partitioner is rebuilt from the current pivots for every batch;
      // its arena block is released and reused each time.
      auto scope = arena.scope();
      Partitioner<T> partitioner(arena, result.pivots(), d);
      partitioner.distribute(input.subspan(static_cast<std::size_t>(begin),
                                           static_cast<std::size_t>(len)),
                             result.buckets, cmp);
    }

    // Split overflowing buckets in ascending logical order. Both halves of
    // a split are <= delta, so a single forward sweep suffices.
    for (std::size_t j = 0; j < result.buckets.count(); ++j) {
      if (result.buckets.fill(j) > delta)
        split_bucket(arena, result.buckets, result.pivot_store, result.k,
                     next_free_slot, slot_area, slot_capacity, slot_count, j, cmp);
    }

    if (observer) {
      std::vector<std::uint64_t> sizes(result.buckets.count());
      for (std::size_t i = 0; i < sizes.size(); ++i) sizes[i] = result.buckets.fill(i);
      observer->on_batch(batch_index, sizes);
    }
    ++batch_index;
    if (n == 0) break;
  }
  return result;
}

}  // namespace detail

// True iff (2n)^d <= delta^{d+1} and delta <= n, the validity window of
// multi_partition, evaluated exactly in saturating 128-bit arithmetic.
inline bool multi_partition_precondition(std::uint64_t n, std::uint64_t delta, int d) {
  if (delta > n || delta == 0) return false;
  return sat_ge(sat_pow(delta, static_cast<unsigned>(d) + 1),
                sat_pow(2 * n, static_cast<unsigned>(d)));
}

// Partitions input into k <= 2n/delta buckets of size <= delta separated by
// k-1 pivots, by distributing delta-sized batches through a k-partitioner
// and median-splitting any bucket that exceeds delta. Buckets come back in
// logical order; element order inside a bucket is arbitrary. Requires
// (2n)^{d/(d+1)} <= delta <= n.
template <typename T, typename Cmp>
MultiPartitionResult<T> multi_partition(Arena<T>& arena, MemSpan<const T> input,
                                        std::uint64_t delta, int d, Cmp cmp,
                                        MultiPartitionObserver* observer = nullptr) {
  if (!multi_partition_precondition(input.size(), delta, d))
    throw std::invalid_argument("multi_partition requires (2N)^(d/(d+1)) <= delta <= N");
  return detail::multi_partition_impl(arena, input, delta, d, cmp, observer);
}

// Same, with the validity window unchecked (for callers that guarantee
// termination by other means, and for tests that step the loop directly).
template <typename T, typename Cmp>
MultiPartitionResult<T> multi_partition_unchecked(Arena<T>& arena, MemSpan<const T> input,
                                                  std::uint64_t delta, int d, Cmp cmp,
                                                  MultiPartitionObserver* observer = nullptr) {
  if (delta == 0) throw std::invalid_argument("multi_partition requires delta >= 1");
  return detail::multi_partition_impl(arena, input, delta, d, cmp, observer);
}

}  // namespace fsel
