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
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "funnelselect/trace.hpp"

namespace fsel {

// View into arena storage. Every element read or write announces itself to
// the trace sink with the element-granular (address, length) of the touch;
// a null sink makes the span an ordinary untraced view.
template <typename T>
class MemSpan {
 public:
  MemSpan() = default;
  MemSpan(T* data, addr_t addr, std::size_t len, TraceSink* sink)
      : data_(data), addr_(addr), len_(len), sink_(sink) {}

  // T -> const T view conversion.
  template <typename U = T,
            typename = std::enable_if_t<std::is_const_v<U>>>
  MemSpan(const MemSpan<std::remove_const_t<U>>& other)
      : data_(other.raw_data()), addr_(other.address()), len_(other.size()),
        sink_(other.sink()) {}

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }
  addr_t address() const { return addr_; }
  TraceSink* sink() const { return sink_; }

  std::remove_const_t<T> load(std::size_t i) const {
    assert(i < len_);
    touch(i, 1);
    return data_[i];
  }

  void store(std::size_t i, const std::remove_const_t<T>& v) const {
    static_assert(!std::is_const_v<T>, "cannot store through a const span");
    assert(i < len_);
    touch(i, 1);
    data_[i] = v;
  }

  void touch(std::size_t offset, std::size_t count) const {
    if (sink_) sink_->on_access(addr_ + offset, count);
  }

  MemSpan subspan(std::size_t offset, std::size_t count) const {
    assert(offset + count <= len_);
    return MemSpan(data_ + offset, addr_ + offset, count, sink_);
  }

  MemSpan first(std::size_t count) const { return subspan(0, count); }

  // Instrumentation escape hatch: bypasses tracing entirely. Observers use
  // it so that inspection never perturbs miss or comparison counts.
  T* raw_data() const { return data_; }

 private:
  T* data_ = nullptr;
  addr_t addr_ = 0;
  std::size_t len_ = 0;
  TraceSink* sink_ = nullptr;
};

template <typename T>
void span_swap(const MemSpan<T>& s, std::size_t i, std::size_t j) {
  T a = s.load(i);
  T b = s.load(j);
  s.store(i, b);
  s.store(j, a);
}

struct ArenaOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contiguous element-granular address space with strictly stack-ordered
// allocation: scoped marks release everything allocated after them, so
// lifetimes are LIFO by construction. The base address is block-aligned
// for every simulated block size (it starts at a caller-chosen offset,
// zero by default).
template <typename T>
class Arena {
 public:
  explicit Arena(std::size_t capacity, TraceSink* sink = nullptr, addr_t base_addr = 0)
      : storage_(capacity ? std::make_unique_for_overwrite<T[]>(capacity) : nullptr),
        capacity_(capacity), base_(base_addr), sink_(sink) {}

  MemSpan<T> alloc(std::size_t count) {
    if (count > capacity_ - top_)
      throw ArenaOverflow("arena overflow: need " + std::to_string(count) +
                          " cells, " + std::to_string(capacity_ - top_) + " free");
    MemSpan<T> span(storage_.get() + top_, base_ + top_, count, sink_);
    top_ += count;
    if (top_ > high_water_) high_water_ = top_;
    return span;
  }

  class Scope {
   public:
    explicit Scope(Arena& arena) : arena_(&arena), mark_(arena.top_) {}
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    ~Scope() { release(); }

    void release() {
      if (arena_) {
        assert(arena_->top_ >= mark_);
        arena_->top_ = mark_;
        arena_ = nullptr;
      }
    }

   private:
    Arena* arena_;
    std::size_t mark_;
  };

  Scope scope() { return Scope(*this); }

  std::size_t capacity() const { return capacity_; }
  std::size_t used() const { return top_; }
  std::size_t high_water() const { return high_water_; }
  TraceSink* sink() const { return sink_; }

 private:
  std::unique_ptr<T[]> storage_;
  std::size_t capacity_ = 0;
  std::size_t top_ = 0;
  std::size_t high_water_ = 0;
  addr_t base_ = 0;
  TraceSink* sink_ = nullptr;
};

}  // namespace fsel
