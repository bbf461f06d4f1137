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
#include <span>
#include <stdexcept>
#include <vector>

#include "funnelselect/arena.hpp"
#include "funnelselect/core.hpp"
#include "funnelselect/funnelsort.hpp"
#include "funnelselect/intmath.hpp"
#include "funnelselect/multipartition.hpp"
#include "funnelselect/select.hpp"
#include "funnelselect/workspace.hpp"

namespace fsel {

// Tall-cache model constant epsilon (as an exact rational) and the derived
// structure exponent d = max(ceil(1 + 2/epsilon), 2). Epsilon parameterizes
// the model's guarantee, not any knowledge of actual cache parameters; the
// algorithms stay oblivious to M and B.
struct Config {
  std::uint32_t eps_num = 1;
  std::uint32_t eps_den = 1;
  int d_override = 0;  // 0: derive from epsilon

  int d() const {
    if (d_override != 0) {
      if (d_override < 2) throw std::invalid_argument("d must be >= 2");
      return d_override;
    }
    if (eps_num == 0 || eps_den == 0)
      throw std::invalid_argument("epsilon must be positive");
    // ceil(1 + 2/eps) = 1 + ceil(2*den / num)
    std::uint64_t derived = 1 + ceil_div_u64(2ull * eps_den, eps_num);
    return derived < 2 ? 2 : static_cast<int>(derived);
  }
};

template <typename T>
struct ReportEntry {
  rank_t rank;
  T value;
};

// The q order statistics in increasing rank order.
template <typename T>
struct SelectionReport {
  std::vector<ReportEntry<T>> entries;

  std::size_t size() const { return entries.size(); }
};

// Instrumentation callbacks fired along the recursion. Element views are
// raw (untraced) so observation never changes miss or comparison counts.
template <typename T>
struct RecursionObserver {
  virtual ~RecursionObserver() = default;
  // Entry into a (sub)problem: its size, its local 1-based query ranks.
  virtual void on_call(int /*depth*/, std::uint64_t /*n*/,
                       const std::vector<rank_t>& /*local_ranks*/) {}
  // Chosen bucket-capacity threshold and which branch runs.
  virtual void on_delta(int /*depth*/, std::uint64_t /*delta*/, bool /*sorting_case*/) {}
  // A recursive subproblem spawned from the call at `depth`, spanning the
  // open rank interval (r_min, r_max) in that call's local ranks.
  virtual void on_subproblem(int /*depth*/, rank_t /*r_min*/, rank_t /*r_max*/,
                             std::uint64_t /*size*/, const T* /*data*/,
                             std::uint64_t /*count*/) {}
};

// True iff the instance is cheap enough that sorting is within the I/O
// budget: (2n)^d >= delta^{d+1} or n^{1 + 1/(1+eps)} >= delta^2. Both
// disjuncts are evaluated exactly: the second becomes
// n^(num + 2*den) >= delta^(2*(num + den)) for eps = num/den.
inline bool base_case_predicate(std::uint64_t n, std::uint64_t delta, const Config& cfg) {
  unsigned d = static_cast<unsigned>(cfg.d());
  if (sat_ge(sat_pow(2 * n, d), sat_pow(delta, d + 1))) return true;
  unsigned lhs_exp = cfg.eps_num + 2 * cfg.eps_den;
  unsigned rhs_exp = 2 * (cfg.eps_num + cfg.eps_den);
  return sat_ge(sat_pow(n, lhs_exp), sat_pow(delta, rhs_exp));
}

// Smallest gap value whose <=-prefix weight mass (weights are the gap sizes
// themselves) reaches n/2 + 1. The threshold is integral: sum >= n/2 + 1
// over integers is sum >= ceil((n+2)/2).
template <typename Cmp>
rank_t choose_delta(Arena<rank_t>& rank_arena, MemSpan<rank_t> gaps, std::uint64_t n, Cmp cmp) {
  std::uint64_t target = (n + 3) / 2;  // ceil((n + 2) / 2)
  return weighted_select(rank_arena, gaps, target, cmp, [](rank_t g) { return g; });
}

namespace detail {

template <typename T>
class ReportSink {
 public:
  explicit ReportSink(SelectionReport<T>& report) : report_(&report) {}

  void emit(rank_t rank, const T& value) {
    if (!report_->entries.empty() && report_->entries.back().rank >= rank)
      throw std::logic_error("report ranks must strictly increase");
    report_->entries.push_back(ReportEntry<T>{rank, value});
  }

 private:
  SelectionReport<T>* report_;
};

template <typename T, typename Cmp, typename RankCmp>
void funnelselect_recurse(Workspace<T>& ws, MemSpan<T> elems, MemSpan<const rank_t> rview,
                          rank_t shift, const Config& cfg, Cmp cmp, RankCmp rank_cmp,
                          ReportSink<T>& sink, RecursionObserver<T>* observer, int depth) {
  const std::uint64_t n = elems.size();
  const std::uint64_t q = rview.size();
  assert(q >= 1);

  if (observer) {
    std::vector<rank_t> local(q);
    for (std::uint64_t i = 0; i < q; ++i)
      local[i] = rview.raw_data()[i] - shift;
    observer->on_call(depth, n, local);
  }

  // Gap profile and threshold. The gap array is scratch; it is released
  // before any further allocation so arena lifetimes stay stacked.
  rank_t delta;
  {
    auto scope = ws.ranks.scope();
    MemSpan<rank_t> gaps = ws.ranks.alloc(static_cast<std::size_t>(q) + 1);
    rank_t prev = shift;
    for (std::uint64_t i = 0; i < q; ++i) {
      rank_t r = rview.load(static_cast<std::size_t>(i));
      gaps.store(static_cast<std::size_t>(i), r - prev);
      prev = r;
    }
    gaps.store(static_cast<std::size_t>(q), shift + n + 1 - prev);
    delta = choose_delta(ws.ranks, gaps, n, rank_cmp);
  }

  const bool sorting = base_case_predicate(n, delta, cfg);
  if (observer) observer->on_delta(depth, delta, sorting);

  if (sorting) {
    funnel_sort(ws.elements, elems, cmp, cfg.d());
    for (std::uint64_t i = 0; i < q; ++i) {
      rank_t r = rview.load(static_cast<std::size_t>(i));
      sink.emit(r, elems.load(static_cast<std::size_t>(r - shift - 1)));
    }
    return;
  }

  auto scope = ws.elements.scope();
  MultiPartitionResult<T> parts =
      detail::multi_partition_impl(ws.elements, MemSpan<const T>(elems), delta, cfg.d(), cmp,
                                   static_cast<MultiPartitionObserver*>(nullptr));

  const std::uint64_t k = parts.k;
  std::uint64_t rpos = 0;          // cursor into rview
  rank_t pivot_rank_prev = 0;      // local rank just below bucket i's range
#ifndef NDEBUG
  std::uint64_t recursed_mass = 0;
#endif
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t size_i = parts.buckets.fill(static_cast<std::size_t>(i));
    const rank_t pivot_rank = pivot_rank_prev + size_i + 1;

    // Local query ranks strictly inside (pivot_rank_prev, pivot_rank).
    std::uint64_t rbegin = rpos;
    while (rpos < q && rview.load(static_cast<std::size_t>(rpos)) - shift < pivot_rank) ++rpos;
    std::uint64_t rcount = rpos - rbegin;

    if (rcount > 0) {
      MemSpan<T> bucket = parts.buckets.content(static_cast<std::size_t>(i));
      rank_t r_max = rview.load(static_cast<std::size_t>(rpos - 1)) - shift - pivot_rank_prev;
      rank_t r_min = rview.load(static_cast<std::size_t>(rbegin)) - shift - pivot_rank_prev;
      select_rank(ws.elements, bucket, r_max, cmp);
      if (rcount > 1) {
        MemSpan<T> below_max = bucket.first(static_cast<std::size_t>(r_max - 1));
        T p_min = select_rank(ws.elements, below_max, r_min, cmp);
        sink.emit(shift + pivot_rank_prev + r_min, p_min);
        if (rcount > 2) {
          std::uint64_t sub_n = r_max - r_min - 1;
          MemSpan<T> middle = bucket.subspan(static_cast<std::size_t>(r_min),
                                             static_cast<std::size_t>(sub_n));
          assert(sub_n <= delta - 2);
#ifndef NDEBUG
          recursed_mass += sub_n;
#endif
          if (observer)
            observer->on_subproblem(depth, pivot_rank_prev + r_min, pivot_rank_prev + r_max,
                                    sub_n, middle.raw_data(), sub_n);
          funnelselect_recurse(ws, middle, rview.subspan(static_cast<std::size_t>(rbegin + 1),
                                                         static_cast<std::size_t>(rcount - 2)),
                               shift + pivot_rank_prev + r_min, cfg, cmp, rank_cmp, sink,
                               observer, depth + 1);
        }
      }
      sink.emit(shift + pivot_rank_prev + r_max,
                bucket.load(static_cast<std::size_t>(r_max - 1)));
    }

    if (i + 1 < k && rpos < q &&
        rview.load(static_cast<std::size_t>(rpos)) - shift == pivot_rank) {
      sink.emit(shift + pivot_rank,
                parts.pivot_store.load(static_cast<std::size_t>(i)));
      ++rpos;
    }
    pivot_rank_prev = pivot_rank;
  }
  assert(rpos == q);
  assert(2 * recursed_mass < n);  // spawned subproblems carry under half the mass
}

}  // namespace detail

// Cache-oblivious multiple selection: returns the elements at the queried
// ranks in increasing rank order. The input is copied into the workspace
// arena; the caller's buffers are untouched.
template <typename T, typename Cmp = std::less<T>>
SelectionReport<T> multiselect(Workspace<T>& ws, std::span<const T> elements,
                               std::span<const rank_t> ranks, const Config& cfg = Config{},
                               Cmp less = Cmp{}, RecursionObserver<T>* observer = nullptr) {
  RankQuerySet queries;
  queries.n = elements.size();
  queries.ranks.assign(ranks.begin(), ranks.end());
  queries.validate();
  (void)cfg.d();  // validates epsilon/d up front

  SelectionReport<T> report;
  if (ranks.empty()) return report;

  CountingCmp<Cmp> cmp(ws.comparisons, less);
  CountingCmp<std::less<rank_t>> rank_cmp(ws.comparisons);

  auto elem_scope = ws.elements.scope();
  auto rank_scope = ws.ranks.scope();

  MemSpan<T> work = ws.elements.alloc(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) work.store(i, elements[i]);
  MemSpan<rank_t> rwork = ws.ranks.alloc(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) rwork.store(i, ranks[i]);

  detail::ReportSink<T> sink(report);
  detail::funnelselect_recurse(ws, work, MemSpan<const rank_t>(rwork), 0, cfg, cmp, rank_cmp,
                               sink, observer, 0);
  if (report.size() != ranks.size())
    throw std::logic_error("report is missing entries");
  return report;
}

// Self-contained variant: sizes an untraced workspace internally.
template <typename T, typename Cmp = std::less<T>>
SelectionReport<T> multiselect(std::span<const T> elements, std::span<const rank_t> ranks,
                               const Config& cfg = Config{}, Cmp less = Cmp{}) {
  Workspace<T> ws(Workspace<T>::element_capacity_for(elements.size()),
                  Workspace<T>::rank_capacity_for(ranks.size()));
  return multiselect(ws, elements, ranks, cfg, less);
}

}  // namespace fsel
