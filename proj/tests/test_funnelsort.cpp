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

#include <random>

#include "funnelselect/funnelsort.hpp"
#include "funnelselect/trace.hpp"
#include "helpers.hpp"

using namespace fsel;
using fsel::test::Key;

namespace {

std::vector<Key> sort_via_funnel(const std::vector<Key>& input, int d = 3) {
  Arena<Key> arena(3 * input.size() + 4096);
  ComparisonCounter counter;
  CountingCmp<std::less<Key>> cmp(counter);
  MemSpan<Key> s = test::to_arena(arena, input);
  funnel_sort(arena, s, cmp, d);
  return test::to_vector(s);
}

}  // namespace

TEST_CASE("sorts the worked example") {
  std::vector<Key> fig1 = {67, 30, 45, 33, 15, 99, 26, 90, 55, 9, 96, 45, 95, 31, 3};
  std::vector<Key> want = {3, 9, 15, 26, 30, 31, 33, 45, 45, 55, 67, 90, 95, 96, 99};
  CHECK(sort_via_funnel(fig1) == want);
}

TEST_CASE("sorts trivial inputs") {
  CHECK(sort_via_funnel({}) == std::vector<Key>{});
  CHECK(sort_via_funnel({7}) == std::vector<Key>{7});
}

TEST_CASE("matches the standard sort on random multisets") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 200; ++round) {
    std::size_t n = rng() % (1 << 14);
    std::uint64_t universe = round % 3 == 0 ? 16 : 0;
    std::vector<Key> input = test::random_keys(rng, n, universe);
    CHECK(sort_via_funnel(input, round % 2 == 0 ? 3 : 4) == test::sorted_copy(input));
  }
}

TEST_CASE("sorts adversarial orders") {
  std::vector<Key> sorted(5000), reversed(5000), equal(5000, 9);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    sorted[i] = i;
    reversed[i] = sorted.size() - i;
  }
  CHECK(sort_via_funnel(sorted) == test::sorted_copy(sorted));
  CHECK(sort_via_funnel(reversed) == test::sorted_copy(reversed));
  CHECK(sort_via_funnel(equal) == equal);
}

TEST_CASE("an input that fits in cache costs only a few compulsory scans") {
  std::size_t n = 1 << 10;
  CacheModel cache(4096, 64);
  TraceSink sink(&cache, nullptr);
  Arena<Key> arena(3 * n + 4096, &sink);
  ComparisonCounter counter;
  CountingCmp<std::less<Key>> cmp(counter);
  std::mt19937_64 rng(3);
  MemSpan<Key> s = test::to_arena(arena, test::random_keys(rng, n));
  std::uint64_t setup = cache.misses();
  funnel_sort(arena, s, cmp);
  double misses = static_cast<double>(cache.misses() - setup);
  CHECK(misses <= 6.0 * static_cast<double>(n) / 64.0);
}

TEST_CASE("comparison count tracks n lg n") {
  std::mt19937_64 rng(8);
  for (int e : {12, 16, 20}) {
    std::size_t n = std::size_t(1) << e;
    Arena<Key> arena(3 * n + 4096);
    ComparisonCounter counter;
    CountingCmp<std::less<Key>> cmp(counter);
    MemSpan<Key> s = test::to_arena(arena, test::random_keys(rng, n));
    funnel_sort(arena, s, cmp);
    double per_weight = static_cast<double>(counter.count) /
                        (static_cast<double>(n) * static_cast<double>(e));
    CHECK(per_weight >= 0.8);
    CHECK(per_weight <= 1.2);
  }
}
