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
#include <string>
#include <vector>

#include "funnelselect/core.hpp"

namespace fsel::harness {

using Key = std::uint64_t;

// Query-rank regimes spanning single selection through full sorting.
enum class Distribution { kSingle, kUniform, kClustered, kHead, kSorting };

const char* distribution_name(Distribution d);
Distribution parse_distribution(const std::string& name);

struct WorkloadSpec {
  std::uint64_t n = 0;
  Distribution distribution = Distribution::kUniform;
  std::uint64_t q = 0;        // ignored by single/clustered/sorting
  std::uint64_t seed = 0;
  double duplicates = 0.0;    // fraction of keys folded into a smaller universe
};

struct Workload {
  std::vector<Key> keys;
  RankQuerySet queries;
};

// Deterministic in the spec. Rank positions scale with n for a fixed seed
// (the same seed places the single rank or the cluster window at the same
// relative position at every n), which keeps entropy-normalized metrics
// comparable across problem sizes.
Workload generate(const WorkloadSpec& spec);

}  // namespace fsel::harness
