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

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsel {

using rank_t = std::uint64_t;

// Sorted, distinct, 1-based query ranks against a problem of size n.
// q = 0 (no queries) is legal.
struct RankQuerySet {
  std::vector<rank_t> ranks;
  rank_t n = 0;

  std::size_t query_count() const { return ranks.size(); }

  void validate() const {
    rank_t prev = 0;
    for (rank_t r : ranks) {
      if (r <= prev)
        throw std::invalid_argument("query ranks must be strictly increasing and >= 1");
      if (r > n)
        throw std::invalid_argument("query rank " + std::to_string(r) +
                                    " exceeds problem size " + std::to_string(n));
      prev = r;
    }
  }
};

// Gap sizes induced by a query set: gaps[i] = r_{i+1} - r_i with sentinels
// r_0 = 0 and r_{q+1} = n + 1. Entries are >= 1 and sum to n + 1.
struct GapProfile {
  std::vector<rank_t> gaps;
  rank_t n = 0;
};

inline GapProfile compute_gaps(const RankQuerySet& queries) {
  queries.validate();
  GapProfile profile;
  profile.n = queries.n;
  profile.gaps.reserve(queries.ranks.size() + 1);
  rank_t prev = 0;
  for (rank_t r : queries.ranks) {
    profile.gaps.push_back(r - prev);
    prev = r;
  }
  profile.gaps.push_back(queries.n + 1 - prev);
  return profile;
}

// Query-rank entropy: sum of gap * lg(n / gap). The sentinel gap n + 1
// would contribute a slightly negative term, so each summand is clamped
// at zero; entropy is a metrics-only quantity.
inline double query_rank_entropy(const GapProfile& profile) {
  if (profile.n == 0) return 0.0;
  double n = static_cast<double>(profile.n);
  double sum = 0.0;
  for (rank_t gap : profile.gaps) {
    double term = static_cast<double>(gap) * std::log2(n / static_cast<double>(gap));
    if (term > 0.0) sum += term;
  }
  return sum;
}

// Block-transfer analogue of the entropy: entropy / (B * lg(M / B)).
inline double io_entropy(double entropy, std::uint64_t cache_elems, std::uint64_t block_elems) {
  if (block_elems < 1 || cache_elems <= block_elems)
    throw std::invalid_argument("io_entropy requires cache > block >= 1");
  double denom = static_cast<double>(block_elems) *
                 std::log2(static_cast<double>(cache_elems) / static_cast<double>(block_elems));
  return entropy / denom;
}

// Per-run comparison tally. One increment per comparison made through a
// CountingCmp bound to it; never shared across concurrent runs.
struct ComparisonCounter {
  std::uint64_t count = 0;
};

// Comparator wrapper billing every invocation to a counter.
template <typename Less = std::less<>>
class CountingCmp {
 public:
  explicit CountingCmp(ComparisonCounter& counter, Less less = Less())
      : counter_(&counter), less_(less) {}

  template <typename A, typename B>
  bool operator()(const A& a, const B& b) const {
    ++counter_->count;
    return less_(a, b);
  }

  ComparisonCounter& counter() const { return *counter_; }

 private:
  ComparisonCounter* counter_;
  Less less_;
};

}  // namespace fsel
