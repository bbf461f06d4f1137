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

#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "funnelselect/arena.hpp"
#include "funnelselect/intmath.hpp"
#include "funnelselect/select.hpp"

namespace fsel {

namespace detail {

constexpr std::size_t kFunnelsortBase = 64;

// Lazy k-merger, the demand-driven dual of the k-partitioner: bottom
// sqrt(k)-mergers fill middle buffers that a top sqrt(k)-merger consumes.
// Buffers refill only when completely empty. Buffer capacities follow the
// partitioner's rule, max(ceil(k^{d/2}), 16) for a k-unit, bottoming out at
// k <= 2 with a bare binary merge node; single-leaf groups feed the level
// above directly, without a buffer.
template <typename T>
class Merger {
 public:
  Merger(Arena<T>& arena, const std::vector<MemSpan<const T>>& runs, int d) : d_(d) {
    std::uint64_t k = runs.size();
    block_ = arena.alloc(required_cells(k, d));
    streams_.reserve(runs.size());
    for (const auto& r : runs) streams_.push_back(Stream{r, 0});
    std::size_t off = 0;
    std::vector<Source> leaves(k);
    for (std::uint64_t i = 0; i < k; ++i)
      leaves[i] = Source{SourceKind::kStream, static_cast<std::uint32_t>(i)};
    root_ = build(leaves, off);
    if (off != block_.size())
      throw std::logic_error("merger layout does not match required_cells");
  }

  static std::uint64_t required_cells(std::uint64_t k, int d) {
    if (k <= 2) return 0;
    auto [groups, per_group] = split(k);
    std::uint64_t cells = required_cells(groups, d);
    std::uint64_t remaining = k;
    for (std::uint64_t g = 0; g < groups; ++g) {
      std::uint64_t size = remaining < per_group ? remaining : per_group;
      if (size > 1) cells += middle_capacity(k, d) + required_cells(size, d);
      remaining -= size;
    }
    return cells;
  }

  // Drains everything into out; out must hold the total run length.
  template <typename Cmp>
  void merge_all(MemSpan<T> out, Cmp cmp) {
    std::uint64_t produced = produce(root_, out, 0, out.size(), cmp);
    (void)produced;
    assert(produced == out.size());
  }

 private:
  enum class SourceKind : std::uint8_t { kStream, kBuffer, kNode };

  struct Source {
    SourceKind kind;
    std::uint32_t idx;
  };

  struct Stream {
    MemSpan<const T> data;
    std::uint64_t pos;
  };

  struct Buffer {
    MemSpan<T> cells;
    std::uint64_t head = 0, size = 0;
    Source producer{SourceKind::kStream, 0};
    bool done = false;
  };

  struct Node {
    Source left, right;
  };

  // Same split rule as the partitioner: power-of-two bottom fanout keeps
  // the composed node depth at ceil(lg k).
  static std::pair<std::uint64_t, std::uint64_t> split(std::uint64_t k) {
    std::uint64_t per_group = std::bit_floor(ceil_root(k, 2));
    if (per_group < 2) per_group = 2;
    std::uint64_t groups = ceil_div_u64(k, per_group);
    return {groups, per_group};
  }

  static std::uint64_t middle_capacity(std::uint64_t k, int d) {
    std::uint64_t cap = ceil_pow_half(k, static_cast<unsigned>(d));
    return cap < 16 ? 16 : cap;
  }

  Source build(const std::vector<Source>& leaves, std::size_t& off) {
    std::uint64_t m = leaves.size();
    if (m == 1) return leaves[0];
    if (m == 2) {
      nodes_.push_back(Node{leaves[0], leaves[1]});
      return Source{SourceKind::kNode, static_cast<std::uint32_t>(nodes_.size() - 1)};
    }
    auto [groups, per_group] = split(m);
    std::uint64_t cap = middle_capacity(m, d_);

    std::vector<Source> top_leaves(groups);
    std::vector<std::uint32_t> buffer_ids(groups, kNoBuffer);
    for (std::uint64_t g = 0; g < groups; ++g) {
      std::uint64_t lo = g * per_group;
      std::uint64_t hi = lo + per_group < m ? lo + per_group : m;
      if (hi - lo == 1) {
        top_leaves[g] = leaves[lo];  // wire: no buffer for a single leaf
      } else {
        buffer_ids[g] = static_cast<std::uint32_t>(buffers_.size());
        buffers_.push_back(Buffer{});
        top_leaves[g] = Source{SourceKind::kBuffer, buffer_ids[g]};
      }
    }
    Source root = build(top_leaves, off);
    for (std::uint64_t g = 0; g < groups; ++g) {
      if (buffer_ids[g] == kNoBuffer) continue;
      buffers_[buffer_ids[g]].cells = block_.subspan(off, cap);
      off += cap;
    }
    for (std::uint64_t g = 0; g < groups; ++g) {
      if (buffer_ids[g] == kNoBuffer) continue;
      std::uint64_t lo = g * per_group;
      std::uint64_t hi = lo + per_group < m ? lo + per_group : m;
      std::vector<Source> group(leaves.begin() + static_cast<std::ptrdiff_t>(lo),
                                leaves.begin() + static_cast<std::ptrdiff_t>(hi));
      buffers_[buffer_ids[g]].producer = build(group, off);
    }
    return root;
  }

  // True if the source can currently yield an element; refills empty
  // buffers on demand.
  template <typename Cmp>
  bool ready(Source s, Cmp& cmp) {
    switch (s.kind) {
      case SourceKind::kStream:
        return streams_[s.idx].pos < streams_[s.idx].data.size();
      case SourceKind::kBuffer: {
        Buffer& b = buffers_[s.idx];
        if (b.head < b.size) return true;
        if (b.done) return false;
        b.head = b.size = 0;
        std::uint64_t got = produce(b.producer, b.cells, 0, b.cells.size(), cmp);
        b.size = got;
        if (got < b.cells.size()) b.done = true;
        return got > 0;
      }
      case SourceKind::kNode:
        assert(false);  // nodes are pulled via produce(), never peeked
        return false;
    }
    return false;
  }

  T front(Source s) const {
    if (s.kind == SourceKind::kStream) {
      const Stream& st = streams_[s.idx];
      return st.data.load(static_cast<std::size_t>(st.pos));
    }
    const Buffer& b = buffers_[s.idx];
    return b.cells.load(static_cast<std::size_t>(b.head));
  }

  void pop(Source s) {
    if (s.kind == SourceKind::kStream)
      ++streams_[s.idx].pos;
    else
      ++buffers_[s.idx].head;
  }

  // Writes up to `want` merged elements from `s` into dest at dest_fill.
  // Returns the number written; fewer than `want` means exhaustion.
  template <typename Cmp>
  std::uint64_t produce(Source s, MemSpan<T> dest, std::uint64_t dest_fill,
                        std::uint64_t want, Cmp& cmp) {
    if (s.kind != SourceKind::kNode) {
      std::uint64_t written = 0;
      while (written < want && ready(s, cmp)) {
        dest.store(static_cast<std::size_t>(dest_fill + written), front(s));
        pop(s);
        ++written;
      }
      return written;
    }
    Node& n = nodes_[s.idx];
    std::uint64_t written = 0;
    while (written < want) {
      bool has_left = ready(n.left, cmp);
      bool has_right = ready(n.right, cmp);
      if (!has_left && !has_right) break;
      Source take = n.left;
      if (has_left && has_right) {
        // Take the right only when strictly smaller; ties favor the left.
        take = cmp(front(n.right), front(n.left)) ? n.right : n.left;
      } else if (!has_left) {
        take = n.right;
      }
      dest.store(static_cast<std::size_t>(dest_fill + written), front(take));
      pop(take);
      ++written;
    }
    return written;
  }

  static constexpr std::uint32_t kNoBuffer = 0xffffffffu;

  int d_;
  MemSpan<T> block_;
  std::vector<Stream> streams_;
  std::vector<Buffer> buffers_;
  std::vector<Node> nodes_;
  Source root_{SourceKind::kStream, 0};
};

template <typename T, typename Cmp>
void sort_into(Arena<T>& arena, MemSpan<T> src, MemSpan<T> dst, Cmp cmp, int d);

// Sorts src in place; scratch is a same-length region the recursion may
// clobber. Segments are sorted into scratch, then merged back, so no level
// pays a separate copy-back pass.
template <typename T, typename Cmp>
void sort_inplace(Arena<T>& arena, MemSpan<T> src, MemSpan<T> scratch, Cmp cmp, int d) {
  std::size_t n = src.size();
  if (n <= kFunnelsortBase) {
    binary_insertion_sort(src, cmp);
    return;
  }
  std::uint64_t r = std::bit_ceil(ceil_root(n, static_cast<unsigned>(d)));
  if (r < 2) r = 2;
  std::uint64_t seg = ceil_div_u64(n, r);

  std::vector<MemSpan<const T>> runs;
  for (std::size_t begin = 0; begin < n; begin += seg) {
    std::size_t len = begin + seg <= n ? seg : n - begin;
    sort_into(arena, src.subspan(begin, len), scratch.subspan(begin, len), cmp, d);
    runs.push_back(MemSpan<const T>(scratch.subspan(begin, len)));
  }
  auto scope = arena.scope();
  Merger<T> merger(arena, runs, d);
  merger.merge_all(src, cmp);
}

// Sorts src with the result landing in dst; src is clobbered.
template <typename T, typename Cmp>
void sort_into(Arena<T>& arena, MemSpan<T> src, MemSpan<T> dst, Cmp cmp, int d) {
  std::size_t n = src.size();
  if (n <= kFunnelsortBase) {
    binary_insertion_sort(src, cmp);
    for (std::size_t i = 0; i < n; ++i) dst.store(i, src.load(i));
    return;
  }
  std::uint64_t r = std::bit_ceil(ceil_root(n, static_cast<unsigned>(d)));
  if (r < 2) r = 2;
  std::uint64_t seg = ceil_div_u64(n, r);

  std::vector<MemSpan<const T>> runs;
  for (std::size_t begin = 0; begin < n; begin += seg) {
    std::size_t len = begin + seg <= n ? seg : n - begin;
    sort_inplace(arena, src.subspan(begin, len), dst.subspan(begin, len), cmp, d);
    runs.push_back(MemSpan<const T>(src.subspan(begin, len)));
  }
  auto scope = arena.scope();
  Merger<T> merger(arena, runs, d);
  merger.merge_all(dst, cmp);
}

}  // namespace detail

// Cache-oblivious sort: split into ceil(n^{1/d}) segments of size
// ~n^{1-1/d}, sort recursively, merge through a lazy funnel. Sorts in place
// using one n-cell arena scratch region plus the mergers' buffers.
template <typename T, typename Cmp>
void funnel_sort(Arena<T>& arena, MemSpan<T> s, Cmp cmp, int d = 3) {
  if (d < 2) throw std::invalid_argument("funnel_sort requires d >= 2");
  if (s.size() <= detail::kFunnelsortBase) {
    binary_insertion_sort(s, cmp);
    return;
  }
  auto scope = arena.scope();
  MemSpan<T> scratch = arena.alloc(s.size());
  detail::sort_inplace(arena, s, scratch, cmp, d);
}

}  // namespace fsel
