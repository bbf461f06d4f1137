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
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fsel {

using addr_t = std::uint64_t;

// Fully-associative LRU cache over element-granular addresses: capacity of
// M elements moved in blocks of B consecutive elements. Addresses are
// element indices (arena offsets), not bytes. The model only observes the
// access stream; algorithms never see M or B.
class CacheModel {
 public:
  CacheModel(std::uint64_t capacity_elems, std::uint64_t block_elems)
      : m_(capacity_elems), b_(block_elems) {
    if (b_ < 1 || m_ < b_)
      throw std::invalid_argument("cache model requires M >= B >= 1");
    ways_ = m_ / b_;
    slots_.resize(ways_);
    for (std::uint32_t i = 0; i < ways_; ++i) slots_[i] = Slot{kNoBlock, i + 1, kNil};
    free_head_ = 0;
    slots_[ways_ - 1].next = kNil;
    map_.reserve(2 * ways_);
  }

  std::uint64_t capacity_elems() const { return m_; }
  std::uint64_t block_elems() const { return b_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t element_accesses() const { return accesses_; }

  void access(addr_t addr, std::uint64_t len) {
    if (len == 0) return;
    accesses_ += len;
    addr_t first = addr / b_;
    addr_t last = (addr + len - 1) / b_;
    for (addr_t block = first; block <= last; ++block) touch_block(block);
  }

  void reset() {
    map_.clear();
    for (std::uint32_t i = 0; i < ways_; ++i) slots_[i] = Slot{kNoBlock, i + 1, kNil};
    slots_[ways_ - 1].next = kNil;
    free_head_ = 0;
    mru_ = lru_ = kNil;
    misses_ = accesses_ = 0;
  }

 private:
  static constexpr std::uint32_t kNil = 0xffffffffu;
  static constexpr addr_t kNoBlock = ~addr_t(0);

  struct Slot {
    addr_t block;
    std::uint32_t next;
    std::uint32_t prev;
  };

  void touch_block(addr_t block) {
    // Sequential scans mostly re-touch the most recent block.
    if (mru_ != kNil && slots_[mru_].block == block) return;
    auto it = map_.find(block);
    if (it != map_.end()) {
      unlink(it->second);
      push_front(it->second);
      return;
    }
    ++misses_;
    std::uint32_t slot;
    if (free_head_ != kNil) {
      slot = free_head_;
      free_head_ = slots_[slot].next;
    } else {
      slot = lru_;
      unlink(slot);
      map_.erase(slots_[slot].block);
    }
    slots_[slot].block = block;
    map_.emplace(block, slot);
    push_front(slot);
  }

  void unlink(std::uint32_t s) {
    Slot& node = slots_[s];
    if (node.prev != kNil) slots_[node.prev].next = node.next; else mru_ = node.next;
    if (node.next != kNil) slots_[node.next].prev = node.prev; else lru_ = node.prev;
  }

  void push_front(std::uint32_t s) {
    Slot& node = slots_[s];
    node.prev = kNil;
    node.next = mru_;
    if (mru_ != kNil) slots_[mru_].prev = s; else lru_ = s;
    mru_ = s;
  }

  std::uint64_t m_, b_, ways_;
  std::vector<Slot> slots_;
  std::unordered_map<addr_t, std::uint32_t> map_;
  std::uint32_t mru_ = kNil, lru_ = kNil, free_head_ = kNil;
  std::uint64_t misses_ = 0, accesses_ = 0;
};

// Binary access-trace writer: magic "COTR1\n", then one little-endian
// record (address: u64, length: u32) per access.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open trace file: " + path);
    out_.write("COTR1\n", 6);
  }

  void record(addr_t addr, std::uint64_t len) {
    unsigned char buf[12];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((addr >> (8 * i)) & 0xffu);
    std::uint32_t len32 = static_cast<std::uint32_t>(len);
    for (int i = 0; i < 4; ++i) buf[8 + i] = static_cast<unsigned char>((len32 >> (8 * i)) & 0xffu);
    out_.write(reinterpret_cast<const char*>(buf), 12);
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

// The per-element access hook shared by all arenas of a run. A null sink
// pointer on a span is the no-op configuration; the algorithms behave
// identically either way since the sink only observes.
class TraceSink {
 public:
  TraceSink() = default;
  TraceSink(CacheModel* cache, TraceWriter* writer) : cache_(cache), writer_(writer) {}

  void on_access(addr_t addr, std::uint64_t len) {
    if (cache_) cache_->access(addr, len);
    if (writer_) writer_->record(addr, len);
  }

 private:
  CacheModel* cache_ = nullptr;
  TraceWriter* writer_ = nullptr;
};

}  // namespace fsel
