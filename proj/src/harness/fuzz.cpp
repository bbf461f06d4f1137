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

#include "harness/fuzz.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "harness/metrics.hpp"
#include "harness/oracle.hpp"

namespace fsel::harness {

void CheckingObserver::set_top_gap_map(std::unordered_map<Key, std::uint64_t> key_to_gap_size,
                                       std::uint64_t top_delta) {
  top_gap_size_ = std::move(key_to_gap_size);
  top_delta_ = top_delta;
  tag_check_ = true;
}

void CheckingObserver::on_call(int depth, std::uint64_t n, const std::vector<rank_t>& ranks) {
  if (stack_.size() <= static_cast<std::size_t>(depth)) stack_.resize(depth + 1);
  stack_[depth] = Frame{n, 0, 0, false, ranks};
  if (static_cast<std::uint64_t>(depth) > max_depth_) max_depth_ = depth;
  events_.push_back(Event{0, depth, n, ranks.size(), 0});
}

void CheckingObserver::on_delta(int depth, std::uint64_t delta, bool sorting_case) {
  Frame& f = stack_[depth];
  f.delta = delta;
  f.sorting = sorting_case;
  events_.push_back(Event{1, depth, delta, sorting_case ? 1u : 0u, 0});
}

void CheckingObserver::on_subproblem(int depth, rank_t r_min, rank_t r_max, std::uint64_t size,
                                     const Key* data, std::uint64_t count) {
  Frame& f = stack_[depth];
  ++subproblem_count_;
  events_.push_back(Event{2, depth, r_min, r_max, size});

  std::ostringstream where;
  where << "depth " << depth << " subproblem (" << r_min << "," << r_max << ")";

  if (f.delta < 2 || size > f.delta - 2) {
    std::ostringstream msg;
    msg << where.str() << ": size " << size << " exceeds delta-2 = " << f.delta << "-2";
    violations_.push_back(msg.str());
  }

  f.spawned_mass += size;
  if (2 * f.spawned_mass >= f.n) {
    std::ostringstream msg;
    msg << where.str() << ": spawned mass " << f.spawned_mass << " reaches n/2 of n=" << f.n;
    violations_.push_back(msg.str());
  }

  // Gaps of this call fully covered by [r_min, r_max] must be < delta.
  rank_t prev = 0;
  for (std::size_t i = 0; i <= f.ranks.size(); ++i) {
    rank_t next = i < f.ranks.size() ? f.ranks[i] : f.n + 1;
    std::uint64_t gap = next - prev;
    if (prev >= r_min && next <= r_max && gap >= f.delta) {
      std::ostringstream msg;
      msg << where.str() << ": covered gap (" << prev << "," << next << "] of size " << gap
          << " >= delta " << f.delta;
      violations_.push_back(msg.str());
    }
    prev = next;
  }

  if (tag_check_ && depth == 0) {
    for (std::uint64_t i = 0; i < count; ++i) {
      auto it = top_gap_size_.find(data[i]);
      if (it != top_gap_size_.end() && it->second >= top_delta_) {
        std::ostringstream msg;
        msg << where.str() << ": element from a top-level gap of size " << it->second
            << " >= top delta " << top_delta_ << " entered recursion";
        violations_.push_back(msg.str());
        break;
      }
    }
  }
}

AlgorithmFn default_algorithm() {
  return [](Workspace<Key>& ws, std::span<const Key> keys, std::span<const rank_t> ranks,
            const Config& cfg, RecursionObserver<Key>* obs) {
    return multiselect(ws, keys, ranks, cfg, std::less<Key>{}, obs);
  };
}

namespace {

constexpr int kKeyVariants = 7;
constexpr int kRankVariants = 7;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a * 0x9e3779b97f4a7c15ull + b;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  return x;
}

}  // namespace

void build_instance(const FuzzCase& c, std::vector<Key>& keys, std::vector<rank_t>& ranks) {
  std::mt19937_64 rng(mix(c.seed, c.n));
  const std::uint64_t n = c.n;
  keys.resize(n);

  switch (c.key_variant % kKeyVariants) {
    case 0:  // uniform random
      for (auto& k : keys) k = rng() >> 1;
      break;
    case 1:  // about half duplicated
      for (auto& k : keys) k = rng() % std::max<std::uint64_t>(1, n / 2);
      break;
    case 2:  // heavy duplicates, 16 distinct values
      for (auto& k : keys) k = rng() % 16;
      break;
    case 3:  // all equal
      for (auto& k : keys) k = 42;
      break;
    case 4:  // already sorted
      for (std::uint64_t i = 0; i < n; ++i) keys[i] = 10 + 3 * i;
      break;
    case 5:  // reverse sorted
      for (std::uint64_t i = 0; i < n; ++i) keys[i] = 10 + 3 * (n - 1 - i);
      break;
    case 6:  // distinct, shuffled
      for (std::uint64_t i = 0; i < n; ++i) keys[i] = 1 + i;
      std::shuffle(keys.begin(), keys.end(), rng);
      break;
  }

  ranks.clear();
  switch (c.rank_variant % kRankVariants) {
    case 0: {  // single random rank
      ranks.push_back(1 + rng() % n);
      break;
    }
    case 1: {  // random distinct set
      std::uint64_t q = 1 + rng() % n;
      std::vector<rank_t> all(n);
      for (std::uint64_t i = 0; i < n; ++i) all[i] = i + 1;
      std::shuffle(all.begin(), all.end(), rng);
      ranks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(q));
      std::sort(ranks.begin(), ranks.end());
      break;
    }
    case 2:  // empty query set
      break;
    case 3: {  // head: 1..q
      std::uint64_t q = 1 + rng() % n;
      for (std::uint64_t i = 0; i < q; ++i) ranks.push_back(i + 1);
      break;
    }
    case 4: {  // full sort
      for (std::uint64_t i = 0; i < n; ++i) ranks.push_back(i + 1);
      break;
    }
    case 5: {  // both extremes plus a middle rank
      ranks.push_back(1);
      if (n >= 3) ranks.push_back(1 + n / 2);
      if (n >= 2) ranks.push_back(n);
      std::sort(ranks.begin(), ranks.end());
      ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
      break;
    }
    case 6: {  // tight clusters of consecutive-ish ranks
      std::uint64_t clusters = 1 + rng() % 3;
      for (std::uint64_t c = 0; c < clusters; ++c) {
        std::uint64_t center = 1 + rng() % n;
        std::uint64_t width = 1 + rng() % 8;
        for (std::uint64_t r = center; r <= std::min<std::uint64_t>(n, center + width); ++r)
          ranks.push_back(r);
      }
      std::sort(ranks.begin(), ranks.end());
      ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
      break;
    }
  }
}

std::string describe_case(const FuzzCase& c) {
  std::ostringstream os;
  os << "n=" << c.n << " seed=" << c.seed << " key_variant=" << (c.key_variant % kKeyVariants)
     << " rank_variant=" << (c.rank_variant % kRankVariants);
  return os.str();
}

std::optional<std::string> run_instance(const FuzzCase& c, const FuzzOptions& opt,
                                        const AlgorithmFn& alg) {
  std::vector<Key> keys;
  std::vector<rank_t> ranks;
  build_instance(c, keys, ranks);

  SelectionReport<Key> expected = oracle_multiselect<Key>(keys, ranks);

  Config cfg;
  std::size_t ecap = Workspace<Key>::element_capacity_for(keys.size());
  std::size_t rcap = Workspace<Key>::rank_capacity_for(ranks.size());

  CheckingObserver traced_obs;
  bool distinct = true;
  {
    std::vector<Key> sorted(keys);
    std::sort(sorted.begin(), sorted.end());
    distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    if (distinct && !ranks.empty()) {
      // Map each key to the size of the top-level gap containing its rank;
      // the top-level delta is recomputed from the profile for the check.
      RankQuerySet qs{std::vector<rank_t>(ranks.begin(), ranks.end()),
                      static_cast<rank_t>(keys.size())};
      GapProfile profile = compute_gaps(qs);
      std::uint64_t target = (keys.size() + 3) / 2;
      std::vector<rank_t> gaps_sorted(profile.gaps);
      std::sort(gaps_sorted.begin(), gaps_sorted.end());
      std::uint64_t acc = 0, top_delta = gaps_sorted.back();
      for (rank_t g : gaps_sorted) {
        acc += g;
        if (acc >= target) {
          top_delta = g;
          break;
        }
      }
      std::unordered_map<Key, std::uint64_t> key_gap;
      std::size_t gi = 0;
      rank_t consumed = profile.gaps[0];
      for (std::size_t pos = 0; pos < sorted.size(); ++pos) {
        while (pos + 1 > consumed) {
          ++gi;
          consumed += profile.gaps[gi];
        }
        key_gap[sorted[pos]] = profile.gaps[gi];
      }
      traced_obs.set_top_gap_map(std::move(key_gap), top_delta);
    }
  }

  CacheModel cache(opt.cache_m, opt.cache_b);
  Workspace<Key> traced_ws(ecap, rcap, &cache);
  SelectionReport<Key> got;
  try {
    got = alg(traced_ws, keys, ranks, cfg, &traced_obs);
  } catch (const std::exception& e) {
    return std::string("exception during traced run: ") + e.what();
  }

  if (!reports_equal(got, expected)) {
    std::ostringstream msg;
    msg << "report mismatch vs oracle (" << got.size() << " vs " << expected.size()
        << " entries)";
    for (std::size_t i = 0; i < std::min(got.size(), expected.size()); ++i) {
      if (got.entries[i].rank != expected.entries[i].rank ||
          got.entries[i].value != expected.entries[i].value) {
        msg << "; first divergence at index " << i << ": got (" << got.entries[i].rank << ","
            << got.entries[i].value << ") want (" << expected.entries[i].rank << ","
            << expected.entries[i].value << ")";
        break;
      }
    }
    return msg.str();
  }

  if (!traced_obs.violations().empty())
    return "recursion invariant violated: " + traced_obs.violations().front();

  if (opt.compare_untraced) {
    CheckingObserver plain_obs;
    Workspace<Key> plain_ws(ecap, rcap);
    SelectionReport<Key> plain;
    try {
      plain = alg(plain_ws, keys, ranks, cfg, &plain_obs);
    } catch (const std::exception& e) {
      return std::string("exception during untraced run: ") + e.what();
    }
    if (!reports_equal(plain, got))
      return "untraced run reported different elements";
    if (plain_ws.comparisons.count != traced_ws.comparisons.count)
      return "untraced run made a different number of comparisons";
    const auto& a = traced_obs.events();
    const auto& b = plain_obs.events();
    if (a.size() != b.size())
      return "untraced run had a different recursion shape (event count)";
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].kind != b[i].kind || a[i].depth != b[i].depth || a[i].a != b[i].a ||
          a[i].b != b[i].b || a[i].c != b[i].c)
        return "untraced run had a different recursion shape";
    }
  }
  return std::nullopt;
}

FuzzOutcome run_fuzz(const FuzzOptions& opt, const AlgorithmFn& alg) {
  FuzzOutcome outcome;
  std::mt19937_64 rng(opt.seed);
  for (std::uint64_t round = 0; round < opt.rounds; ++round) {
    FuzzCase c;
    c.seed = mix(opt.seed, round);
    c.n = 1 + rng() % opt.max_n;
    c.key_variant = static_cast<int>(round % kKeyVariants);
    c.rank_variant = static_cast<int>((round / kKeyVariants) % kRankVariants);

    std::optional<std::string> failure = run_instance(c, opt, alg);
    ++outcome.rounds_run;
    if (!failure) continue;

    // Shrink by halving n while the failure reproduces.
    FuzzCase smallest = c;
    std::string smallest_failure = *failure;
    while (smallest.n > 1) {
      FuzzCase half = smallest;
      half.n = smallest.n / 2;
      std::optional<std::string> f = run_instance(half, opt, alg);
      if (!f) break;
      smallest = half;
      smallest_failure = *f;
    }
    outcome.pass = false;
    outcome.has_reproducer = true;
    outcome.reproducer = smallest;
    outcome.message = smallest_failure + " [reproducer: " + describe_case(smallest) + "]";
    return outcome;
  }
  return outcome;
}

}  // namespace fsel::harness
