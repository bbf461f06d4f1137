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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "funnelselect/arena.hpp"
#include "funnelselect/intmath.hpp"

namespace fsel {

struct BucketOverflow : std::logic_error {
  using std::logic_error::logic_error;
};

// k append-only output sequences over fixed-capacity arena regions, kept in
// logical (pivot-interval) order. The order bookkeeping is metadata and is
// not billed as element traffic; appended elements are.
template <typename T>
class OutputBuckets {
 public:
  OutputBuckets() = default;

  void add(MemSpan<T> region, std::uint64_t fill = 0) {
    buckets_.push_back(Bucket{region, fill});
  }

  void insert(std::size_t pos, MemSpan<T> region, std::uint64_t fill) {
    buckets_.insert(buckets_.begin() + static_cast<std::ptrdiff_t>(pos), Bucket{region, fill});
  }

  std::size_t count() const { return buckets_.size(); }
  std::uint64_t fill(std::size_t i) const { return buckets_[i].fill; }
  void set_fill(std::size_t i, std::uint64_t f) { buckets_[i].fill = f; }
  MemSpan<T> region(std::size_t i) const { return buckets_[i].region; }
  MemSpan<T> content(std::size_t i) const {
    return buckets_[i].region.first(static_cast<std::size_t>(buckets_[i].fill));
  }

  void append(std::size_t i, const T& x) {
    Bucket& b = buckets_[i];
    if (b.fill >= b.region.size())
      throw BucketOverflow("bucket " + std::to_string(i) + " exceeded its capacity");
    b.region.store(static_cast<std::size_t>(b.fill), x);
    ++b.fill;
  }

 private:
  struct Bucket {
    MemSpan<T> region;
    std::uint64_t fill;
  };
  std::vector<Bucket> buckets_;
};

// Cache-oblivious k-partitioner: a tree of k-1 binary partitioning nodes
// with buffers between recursion levels, distributing a batch around k-1
// sorted pivots into k buckets.
//
// A k-partitioner is composed of a top ceil(sqrt(k))-partitioner feeding
// that many middle buffers, each consumed by a bottom partitioner covering
// a contiguous slice of the output range. Middle buffers of a k-unit hold
// max(ceil(k^{d/2}), 16) elements; the recursion bottoms out at k <= 2,
// a single binary node with no internal buffers. Pivot slots and buffer
// cells live in one contiguous arena block laid out recursively as
// [top unit | middle buffers | bottom units].
//
// Per node, an element x goes left iff x < pivot, so bucket i receives
// exactly the x with P_{i-1} <= x < P_i under the strict rule (buckets may
// additionally hold x == P_i placed there by earlier splits; the weak
// contract P_{i-1} <= x <= P_i is what callers rely on).
template <typename T>
class Partitioner {
 public:
  // Structure summary of the root composite, for inspection.
  struct Shape {
    std::uint64_t buckets = 0;
    std::uint64_t top_fanout = 0;       // number of middle buffers (0 if k <= 2)
    std::uint64_t bottom_fanout = 0;    // outputs per bottom unit (last may be smaller)
    std::uint64_t middle_capacity = 0;  // cells per middle buffer
    std::uint64_t nodes = 0;
    std::uint64_t buffer_cells = 0;     // total internal buffer cells
  };

  Partitioner(Arena<T>& arena, MemSpan<const T> pivots, int d) : d_(d) {
    if (d < 2) throw std::invalid_argument("partitioner requires d >= 2");
    for (std::size_t i = 1; i < pivots.size(); ++i)
      if (pivots.load(i) < pivots.load(i - 1))
        throw std::invalid_argument("partitioner pivots must be sorted");
    k_ = pivots.size() + 1;
    block_ = arena.alloc(required_cells(k_, d));
    std::size_t off = 0;
    std::vector<Sink> outs(k_);
    for (std::uint64_t i = 0; i < k_; ++i) outs[i] = Sink{SinkKind::kBucket, static_cast<std::uint32_t>(i)};
    std::vector<std::uint64_t> pivot_ids(k_ > 0 ? k_ - 1 : 0);
    for (std::uint64_t i = 0; i + 1 < k_; ++i) pivot_ids[i] = i;
    root_ = build(pivots, outs, pivot_ids, off, /*record_shape=*/true);
    if (off != block_.size())
      throw std::logic_error("partitioner layout does not match required_cells");
    shape_.buckets = k_;
    shape_.nodes = nodes_.size();
    for (const Buffer& b : buffers_) shape_.buffer_cells += b.cells.size();
  }

  // Total arena cells a k-partitioner occupies: k-1 pivot slots plus all
  // internal buffer cells. O(k^{(d+1)/2}). Single-output groups are wires
  // and carry no buffer.
  static std::uint64_t required_cells(std::uint64_t k, int d) {
    if (k <= 1) return 0;
    if (k == 2) return 1;  // one pivot slot
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

  std::uint64_t bucket_count() const { return k_; }
  std::uint64_t node_count() const { return nodes_.size(); }
  const Shape& shape() const { return shape_; }

  // Distributes a batch into the buckets. All internal buffers are empty on
  // return (terminal top-down flush).
  template <typename Cmp>
  void distribute(MemSpan<const T> batch, OutputBuckets<T>& out, Cmp cmp) {
    for (std::size_t i = 0; i < batch.size(); ++i) push(root_, batch.load(i), out, cmp);
    for (std::uint32_t id : drain_order_) drain(buffers_[id], out, cmp);
    for (const Buffer& b : buffers_) {
      (void)b;
      assert(b.fill == 0);
    }
  }

 private:
  enum class SinkKind : std::uint8_t { kBucket, kBuffer, kNode };

  struct Sink {
    SinkKind kind;
    std::uint32_t idx;
  };

  struct Node {
    MemSpan<T> pivot_slot;  // one cell
    Sink left, right;
  };

  struct Buffer {
    MemSpan<T> cells;
    std::uint64_t fill = 0;
    Sink consumer{SinkKind::kBucket, 0};
  };

  // Bottom fanout is the power of two nearest sqrt(k) from below; full
  // bottom units are then perfect binary trees and the composed node depth
  // stays at ceil(lg k) while both levels remain Theta(sqrt(k)).
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

  Sink build(MemSpan<const T> pivots, const std::vector<Sink>& outs,
             const std::vector<std::uint64_t>& pivot_ids, std::size_t& off,
             bool record_shape) {
    std::uint64_t m = outs.size();
    if (m == 1) return outs[0];
    if (m == 2) {
      MemSpan<T> slot = block_.subspan(off, 1);
      off += 1;
      slot.store(0, pivots.load(pivot_ids[0]));
      nodes_.push_back(Node{slot, outs[0], outs[1]});
      return Sink{SinkKind::kNode, static_cast<std::uint32_t>(nodes_.size() - 1)};
    }

    auto [groups, per_group] = split(m);
    std::uint64_t cap = middle_capacity(m, d_);

    std::vector<std::uint32_t> buffer_ids(groups, kNoBuffer);
    std::vector<Sink> top_outs(groups);
    for (std::uint64_t g = 0; g < groups; ++g) {
      std::uint64_t lo = g * per_group;
      std::uint64_t hi = lo + per_group < m ? lo + per_group : m;
      if (hi - lo == 1) {
        top_outs[g] = outs[lo];  // wire: a single output needs no buffer
      } else {
        buffer_ids[g] = static_cast<std::uint32_t>(buffers_.size());
        buffers_.push_back(Buffer{});
        top_outs[g] = Sink{SinkKind::kBuffer, buffer_ids[g]};
      }
    }

    std::vector<std::uint64_t> top_pivot_ids(groups - 1);
    for (std::uint64_t g = 0; g + 1 < groups; ++g)
      top_pivot_ids[g] = pivot_ids[(g + 1) * per_group - 1];
    Sink root = build(pivots, top_outs, top_pivot_ids, off, false);

    for (std::uint64_t g = 0; g < groups; ++g) {
      if (buffer_ids[g] == kNoBuffer) continue;
      buffers_[buffer_ids[g]].cells = block_.subspan(off, cap);
      off += cap;
      drain_order_.push_back(buffer_ids[g]);
    }

    for (std::uint64_t g = 0; g < groups; ++g) {
      if (buffer_ids[g] == kNoBuffer) continue;
      std::uint64_t lo = g * per_group;
      std::uint64_t hi = lo + per_group < m ? lo + per_group : m;
      std::vector<Sink> group_outs(outs.begin() + static_cast<std::ptrdiff_t>(lo),
                                   outs.begin() + static_cast<std::ptrdiff_t>(hi));
      std::vector<std::uint64_t> group_pivot_ids(
          pivot_ids.begin() + static_cast<std::ptrdiff_t>(lo),
          pivot_ids.begin() + static_cast<std::ptrdiff_t>(hi - 1));
      buffers_[buffer_ids[g]].consumer = build(pivots, group_outs, group_pivot_ids, off, false);
    }

    if (record_shape) {
      shape_.top_fanout = groups;
      shape_.bottom_fanout = per_group;
      shape_.middle_capacity = cap;
    }
    return root;
  }

  template <typename Cmp>
  void push(Sink sink, const T& x, OutputBuckets<T>& out, Cmp& cmp) {
    for (;;) {
      switch (sink.kind) {
        case SinkKind::kBucket:
          out.append(sink.idx, x);
          return;
        case SinkKind::kBuffer: {
          Buffer& b = buffers_[sink.idx];
          if (b.fill == b.cells.size()) drain(b, out, cmp);
          b.cells.store(static_cast<std::size_t>(b.fill), x);
          ++b.fill;
          return;
        }
        case SinkKind::kNode: {
          Node& n = nodes_[sink.idx];
          T pivot = n.pivot_slot.load(0);
          sink = cmp(x, pivot) ? n.left : n.right;
          break;
        }
      }
    }
  }

  template <typename Cmp>
  void drain(Buffer& b, OutputBuckets<T>& out, Cmp& cmp) {
    std::uint64_t count = b.fill;
    b.fill = 0;
    for (std::uint64_t i = 0; i < count; ++i)
      push(b.consumer, b.cells.load(static_cast<std::size_t>(i)), out, cmp);
  }

  static constexpr std::uint32_t kNoBuffer = 0xffffffffu;

  int d_;
  std::uint64_t k_ = 1;
  MemSpan<T> block_;
  std::vector<Node> nodes_;
  std::vector<Buffer> buffers_;
  std::vector<std::uint32_t> drain_order_;
  Sink root_{SinkKind::kBucket, 0};
  Shape shape_;
};

}  // namespace fsel
