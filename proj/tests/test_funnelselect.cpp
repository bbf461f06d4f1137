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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>
#include <thread>

#include "funnelselect/funnelselect.hpp"
#include "harness/fuzz.hpp"
#include "harness/oracle.hpp"
#include "helpers.hpp"

using namespace fsel;
using namespace fsel::harness;
using fsel::test::Key;

namespace {

const std::vector<Key> kFig1 = {67, 30, 45, 33, 15, 99, 26, 90, 55, 9, 96, 45, 95, 31, 3};

std::vector<Key> values_of(const SelectionReport<Key>& report) {
  std::vector<Key> out;
  for (const auto& e : report.entries) out.push_back(e.value);
  return out;
}

}  // namespace

TEST_CASE("the worked example reports 3, 9, 15, 45") {
  std::vector<rank_t> ranks = {1, 2, 3, 8};
  SelectionReport<Key> report = multiselect<Key>(kFig1, ranks);
  CHECK(values_of(report) == std::vector<Key>{3, 9, 15, 45});
  for (std::size_t i = 0; i < ranks.size(); ++i) CHECK(report.entries[i].rank == ranks[i]);
}

TEST_CASE("an empty query set reports nothing and compares nothing") {
  Workspace<Key> ws(1 << 12, 64);
  SelectionReport<Key> report = multiselect<Key>(ws, kFig1, {});
  CHECK(report.size() == 0);
  CHECK(ws.comparisons.count == 0);
}

TEST_CASE("invalid query sets are rejected") {
  Workspace<Key> ws(1 << 12, 64);
  std::vector<rank_t> too_big = {16};
  std::vector<rank_t> zero = {0};
  std::vector<rank_t> unsorted = {3, 2};
  CHECK_THROWS_AS(multiselect<Key>(ws, kFig1, too_big), std::invalid_argument);
  CHECK_THROWS_AS(multiselect<Key>(ws, kFig1, zero), std::invalid_argument);
  CHECK_THROWS_AS(multiselect<Key>(ws, kFig1, unsorted), std::invalid_argument);
}

TEST_CASE("the caller's input buffer is untouched") {
  std::vector<Key> input = kFig1;
  std::vector<rank_t> ranks = {4, 11};
  multiselect<Key>(input, ranks);
  CHECK(input == kFig1);
}

TEST_CASE("choose_delta picks the smallest gap reaching half the mass") {
  Arena<rank_t> arena(1 << 10);
  ComparisonCounter counter;
  CountingCmp<std::less<rank_t>> cmp(counter);

  SUBCASE("worked profile") {
    MemSpan<rank_t> gaps = test::to_arena(arena, std::vector<rank_t>{1, 1, 1, 5, 8});
    CHECK(choose_delta(arena, gaps, 15, cmp) == 8);
  }
  SUBCASE("single sentinel gap") {
    MemSpan<rank_t> gaps = test::to_arena(arena, std::vector<rank_t>{11});
    CHECK(choose_delta(arena, gaps, 10, cmp) == 11);
  }
  SUBCASE("all gaps equal") {
    MemSpan<rank_t> gaps = test::to_arena(arena, std::vector<rank_t>(9, 4));
    CHECK(choose_delta(arena, gaps, 35, cmp) == 4);
  }
}

TEST_CASE("base case predicate evaluates both disjuncts exactly") {
  Config cfg;  // eps = 1, d = 3
  CHECK(base_case_predicate(15, 8, cfg));          // 30^3 >= 8^4
  CHECK(base_case_predicate(1, 1, cfg));
  CHECK(!base_case_predicate(1ull << 30, 1ull << 30, cfg));
  // The boundary of the first disjunct at n = 2^20; (2n)^3 = 2^63 is not a
  // fourth power, so the smallest delta with delta^4 >= 2^63 already fails.
  std::uint64_t n = 1ull << 20;
  std::uint64_t boundary = 55108;
  while (!sat_ge(sat_pow(boundary, 4), sat_pow(2 * n, 3))) ++boundary;
  CHECK(boundary == 55109);
  CHECK(base_case_predicate(n, boundary - 1, cfg));
  CHECK(!base_case_predicate(n, boundary, cfg));
}

TEST_CASE("config derives d from epsilon") {
  Config cfg;
  CHECK(cfg.d() == 3);  // eps = 1
  cfg.eps_num = 1;
  cfg.eps_den = 2;  // eps = 0.5 -> 1 + ceil(4) = 5
  CHECK(cfg.d() == 5);
  cfg.eps_num = 4;
  cfg.eps_den = 1;  // eps = 4 -> ceil(1.5) -> max(2, 2)
  CHECK(cfg.d() == 2);
  cfg.d_override = 4;
  CHECK(cfg.d() == 4);
  cfg.d_override = 1;
  CHECK_THROWS_AS(cfg.d(), std::invalid_argument);
  cfg.d_override = 0;
  cfg.eps_num = 0;
  CHECK_THROWS_AS(cfg.d(), std::invalid_argument);
}

TEST_CASE("report ranks strictly increase and match the oracle on random instances") {
  std::mt19937_64 rng(606);
  for (int round = 0; round < 300; ++round) {
    std::size_t n = 1 + rng() % 2048;
    std::uint64_t universe = round % 3 == 0 ? 8 : 0;
    std::vector<Key> keys = test::random_keys(rng, n, universe);
    std::uint64_t q = 1 + rng() % n;
    std::vector<rank_t> all(n);
    std::iota(all.begin(), all.end(), 1);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<rank_t> ranks(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(q));
    std::sort(ranks.begin(), ranks.end());

    SelectionReport<Key> got = multiselect<Key>(keys, ranks);
    SelectionReport<Key> want = oracle_multiselect<Key>(keys, ranks);
    REQUIRE(reports_equal(got, want));
    for (std::size_t i = 1; i < got.entries.size(); ++i)
      CHECK(got.entries[i - 1].rank < got.entries[i].rank);
  }
}

TEST_CASE("comparison totals are deterministic across runs") {
  std::mt19937_64 rng(17);
  std::vector<Key> keys = test::random_keys(rng, 5000);
  std::vector<rank_t> ranks = {3, 700, 701, 900, 4999};
  Workspace<Key> a(Workspace<Key>::element_capacity_for(keys.size()), 1 << 12);
  Workspace<Key> b(Workspace<Key>::element_capacity_for(keys.size()), 1 << 12);
  multiselect<Key>(a, keys, ranks);
  multiselect<Key>(b, keys, ranks);
  CHECK(a.comparisons.count > 0);
  CHECK(a.comparisons.count == b.comparisons.count);
}

TEST_CASE("recursion spawns exactly the in-bucket rank windows") {
  // Two tight query clusters far apart plus isolated singles; like the
  // paper's routing picture, only the cluster interiors recurse.
  std::uint64_t n = 1 << 15;
  std::vector<Key> keys(n);
  std::iota(keys.begin(), keys.end(), 1);
  std::mt19937_64 rng(40);
  std::shuffle(keys.begin(), keys.end(), rng);

  std::vector<rank_t> ranks = {100,     101,     102,      // cluster A
                               n - 200, n - 199, n - 198,  // cluster B
                               n / 2};                     // lone rank
  std::sort(ranks.begin(), ranks.end());

  CheckingObserver obs;
  Workspace<Key> ws(Workspace<Key>::element_capacity_for(n), 1 << 12);
  SelectionReport<Key> report = multiselect<Key>(ws, keys, ranks, Config{}, std::less<Key>{}, &obs);
  CHECK(reports_equal(report, oracle_multiselect<Key>(keys, ranks)));
  CHECK(obs.violations().empty());

  std::vector<std::pair<rank_t, rank_t>> depth0;
  for (const auto& e : obs.events())
    if (e.kind == 2 && e.depth == 0) depth0.push_back({e.a, e.b});
  REQUIRE(depth0.size() == 2);
  CHECK(depth0[0] == std::pair<rank_t, rank_t>{100, 102});
  CHECK(depth0[1] == std::pair<rank_t, rank_t>{n - 200, n - 198});
}

TEST_CASE("buckets with one or two queries never recurse") {
  std::uint64_t n = 1 << 14;
  std::mt19937_64 rng(41);
  std::vector<Key> keys = test::random_keys(rng, n);
  SUBCASE("single query") {
    CheckingObserver obs;
    Workspace<Key> ws(Workspace<Key>::element_capacity_for(n), 1 << 12);
    std::vector<rank_t> one = {n / 3};
    multiselect<Key>(ws, keys, one, Config{}, std::less<Key>{}, &obs);
    CHECK(obs.subproblem_count() == 0);
  }
  SUBCASE("two queries in the same region") {
    CheckingObserver obs;
    Workspace<Key> ws(Workspace<Key>::element_capacity_for(n), 1 << 12);
    std::vector<rank_t> two = {n / 3, n / 3 + 1};
    multiselect<Key>(ws, keys, two, Config{}, std::less<Key>{}, &obs);
    CHECK(obs.subproblem_count() == 0);
  }
}

TEST_CASE("recursion invariants hold across a mixed corpus") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 100; ++round) {
    std::size_t n = 32 + rng() % 8192;
    std::vector<Key> keys = test::random_keys(rng, n, round % 2 ? 0 : 64);
    std::uint64_t q = 1 + rng() % std::min<std::size_t>(n, 512);
    std::vector<rank_t> all(n);
    std::iota(all.begin(), all.end(), 1);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<rank_t> ranks(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(q));
    std::sort(ranks.begin(), ranks.end());

    CheckingObserver obs;
    Workspace<Key> ws(Workspace<Key>::element_capacity_for(n), 4 * n + 1024);
    multiselect<Key>(ws, keys, ranks, Config{}, std::less<Key>{}, &obs);
    if (!obs.violations().empty()) {
      CAPTURE(obs.violations().front());
      CHECK(obs.violations().empty());
    }
  }
}

TEST_CASE("alternative epsilon settings stay oracle-exact") {
  std::mt19937_64 rng(2025);
  for (auto [num, den] : {std::pair<std::uint32_t, std::uint32_t>{1, 2},  // d = 5
                          std::pair<std::uint32_t, std::uint32_t>{4, 1},  // d = 2
                          std::pair<std::uint32_t, std::uint32_t>{3, 2}}) {
    Config cfg;
    cfg.eps_num = num;
    cfg.eps_den = den;
    for (int round = 0; round < 30; ++round) {
      std::size_t n = 64 + rng() % 4096;
      std::vector<Key> keys = test::random_keys(rng, n, round % 2 ? 0 : 32);
      std::vector<rank_t> ranks = {1, 1 + n / 7, 2 + n / 7, 3 + n / 7, n};
      ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
      SelectionReport<Key> got = multiselect<Key>(keys, ranks, cfg);
      CHECK(reports_equal(got, oracle_multiselect<Key>(keys, ranks)));
    }
  }
}

TEST_CASE("independent workspaces run concurrently without interference") {
  std::mt19937_64 rng(99);
  constexpr int kJobs = 4;
  std::vector<std::vector<Key>> keys(kJobs);
  std::vector<std::vector<rank_t>> ranks(kJobs);
  std::vector<SelectionReport<Key>> serial(kJobs), parallel(kJobs);
  std::vector<std::uint64_t> serial_cmp(kJobs), parallel_cmp(kJobs);

  for (int j = 0; j < kJobs; ++j) {
    std::size_t n = 2000 + 500 * j;
    keys[j] = test::random_keys(rng, n, j % 2 ? 64 : 0);
    ranks[j] = {1, static_cast<rank_t>(n / 3), static_cast<rank_t>(n / 3 + 1),
                static_cast<rank_t>(n)};
    Workspace<Key> ws(Workspace<Key>::element_capacity_for(n), 1 << 12);
    serial[j] = multiselect<Key>(ws, keys[j], ranks[j]);
    serial_cmp[j] = ws.comparisons.count;
  }

  std::vector<std::thread> threads;
  for (int j = 0; j < kJobs; ++j) {
    threads.emplace_back([&, j] {
      Workspace<Key> ws(Workspace<Key>::element_capacity_for(keys[j].size()), 1 << 12);
      parallel[j] = multiselect<Key>(ws, keys[j], ranks[j]);
      parallel_cmp[j] = ws.comparisons.count;
    });
  }
  for (auto& t : threads) t.join();

  for (int j = 0; j < kJobs; ++j) {
    CHECK(reports_equal(parallel[j], serial[j]));
    CHECK(parallel_cmp[j] == serial_cmp[j]);
  }
}

TEST_CASE("tracing is observationally inert") {
  std::mt19937_64 rng(808);
  std::vector<Key> keys = test::random_keys(rng, 6000, 100);
  std::vector<rank_t> ranks = {1, 2, 3, 1000, 1001, 3000, 5999, 6000};

  CacheModel cache(4096, 64);
  Workspace<Key> traced(Workspace<Key>::element_capacity_for(keys.size()), 1 << 12, &cache);
  Workspace<Key> plain(Workspace<Key>::element_capacity_for(keys.size()), 1 << 12);

  CheckingObserver obs_traced, obs_plain;
  SelectionReport<Key> a =
      multiselect<Key>(traced, keys, ranks, Config{}, std::less<Key>{}, &obs_traced);
  SelectionReport<Key> b =
      multiselect<Key>(plain, keys, ranks, Config{}, std::less<Key>{}, &obs_plain);

  CHECK(reports_equal(a, b));
  CHECK(traced.comparisons.count == plain.comparisons.count);
  REQUIRE(obs_traced.events().size() == obs_plain.events().size());
  for (std::size_t i = 0; i < obs_traced.events().size(); ++i) {
    CHECK(obs_traced.events()[i].kind == obs_plain.events()[i].kind);
    CHECK(obs_traced.events()[i].a == obs_plain.events()[i].a);
  }
  CHECK(cache.misses() > 0);
}
