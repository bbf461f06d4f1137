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

#include "harness/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace fsel::harness {

const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::kSingle: return "single";
    case Distribution::kUniform: return "uniform";
    case Distribution::kClustered: return "clustered";
    case Distribution::kHead: return "head";
    case Distribution::kSorting: return "sorting";
  }
  return "?";
}

Distribution parse_distribution(const std::string& name) {
  if (name == "single") return Distribution::kSingle;
  if (name == "uniform") return Distribution::kUniform;
  if (name == "clustered") return Distribution::kClustered;
  if (name == "head") return Distribution::kHead;
  if (name == "sorting") return Distribution::kSorting;
  throw std::invalid_argument("unknown distribution: " + name);
}

namespace {

// Floyd's algorithm: q distinct values from [1, universe].
std::vector<rank_t> sample_distinct(std::mt19937_64& rng, std::uint64_t q, std::uint64_t universe) {
  std::unordered_set<rank_t> chosen;
  std::vector<rank_t> out;
  out.reserve(q);
  for (std::uint64_t j = universe - q + 1; j <= universe; ++j) {
    std::uint64_t t = 1 + rng() % j;
    if (chosen.insert(t).second)
      out.push_back(t);
    else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Workload generate(const WorkloadSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("workload requires n >= 1");
  std::mt19937_64 rng(spec.seed);

  Workload w;
  w.queries.n = spec.n;

  // Position fractions are drawn before the keys so that rank placement for
  // a given seed is independent of n.
  double position_fraction =
      static_cast<double>(rng()) / static_cast<double>(std::numeric_limits<std::uint64_t>::max());

  switch (spec.distribution) {
    case Distribution::kSingle: {
      rank_t r = 1 + static_cast<rank_t>(position_fraction * static_cast<double>(spec.n - 1));
      w.queries.ranks = {r};
      break;
    }
    case Distribution::kUniform: {
      std::uint64_t q = spec.q;
      if (q > spec.n) throw std::invalid_argument("uniform workload requires q <= n");
      if (q == 0) q = 1;
      w.queries.ranks.resize(q);
      rank_t prev = 0;
      for (std::uint64_t i = 1; i <= q; ++i) {
        rank_t r = static_cast<rank_t>((static_cast<unsigned __int128>(i) * spec.n) / q);
        if (r <= prev) r = prev + 1;
        w.queries.ranks[i - 1] = r;
        prev = r;
      }
      break;
    }
    case Distribution::kClustered: {
      std::uint64_t q = static_cast<std::uint64_t>(
          std::ceil(std::sqrt(static_cast<double>(spec.n))));
      std::uint64_t window = static_cast<std::uint64_t>(
          std::ceil(static_cast<double>(spec.n) / std::log2(static_cast<double>(spec.n))));
      if (window > spec.n) window = spec.n;
      if (q > window) q = window;
      std::uint64_t start_max = spec.n - window;
      std::uint64_t start = static_cast<std::uint64_t>(
          position_fraction * static_cast<double>(start_max));
      std::vector<rank_t> offsets = sample_distinct(rng, q, window);
      w.queries.ranks.resize(q);
      for (std::uint64_t i = 0; i < q; ++i) w.queries.ranks[i] = start + offsets[i];
      break;
    }
    case Distribution::kHead: {
      std::uint64_t q = spec.q;
      if (q > spec.n) throw std::invalid_argument("head workload requires q <= n");
      if (q == 0) q = 1;
      w.queries.ranks.resize(q);
      for (std::uint64_t i = 0; i < q; ++i) w.queries.ranks[i] = i + 1;
      break;
    }
    case Distribution::kSorting: {
      w.queries.ranks.resize(spec.n);
      for (std::uint64_t i = 0; i < spec.n; ++i) w.queries.ranks[i] = i + 1;
      break;
    }
  }
  w.queries.validate();

  w.keys.resize(spec.n);
  for (std::uint64_t i = 0; i < spec.n; ++i) w.keys[i] = rng() >> 1;  // [0, 2^63)
  if (spec.duplicates > 0.0) {
    double keep = 1.0 - spec.duplicates;
    std::uint64_t universe = static_cast<std::uint64_t>(
        std::max(1.0, std::ceil(keep * static_cast<double>(spec.n))));
    for (auto& k : w.keys) k %= universe;
  }
  return w;
}

}  // namespace fsel::harness
