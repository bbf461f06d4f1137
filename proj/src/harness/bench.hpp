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
#include <iosfwd>
#include <string>
#include <vector>

#include "harness/workload.hpp"

namespace fsel::harness {

struct CacheGeometry {
  std::uint64_t m = 4096;
  std::uint64_t b = 64;
};

// One row per (workload, M, B, seed) cell.
struct BenchRecord {
  std::string workload;
  std::uint64_t n = 0;
  std::uint64_t q = 0;
  std::uint64_t m = 0;
  std::uint64_t b = 0;
  double entropy = 0.0;
  double entropy_io = 0.0;
  std::uint64_t comparisons = 0;
  std::uint64_t misses = 0;
  std::uint64_t arena_high_water = 0;
  double ratio_cmp = 0.0;  // comparisons / (entropy + n)
  double ratio_io = 0.0;   // misses / (entropy_io + n/b)
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

struct BenchConfig {
  std::vector<Distribution> workloads{Distribution::kSingle, Distribution::kUniform,
                                      Distribution::kClustered, Distribution::kSorting};
  std::vector<std::uint64_t> sizes{1ull << 12, 1ull << 14, 1ull << 16, 1ull << 18, 1ull << 20};
  std::vector<std::uint64_t> seeds{1};
  std::vector<CacheGeometry> caches{{4096, 64}, {65536, 256}};
  double duplicates = 0.0;
  std::uint32_t eps_num = 1;
  std::uint32_t eps_den = 1;
  bool timing = true;  // wall_ms = 0 when off, for bit-exact output comparison
};

// Parses the JSON bench configuration (all fields optional).
BenchConfig load_bench_config(const std::string& path);

CacheGeometry parse_cache_geometry(const std::string& spec);  // "MxB"

// Runs every cell, verifying each report against the oracle (hard gate:
// throws on mismatch). Rows come back in deterministic cell order.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

// One traced cell; exposed for tests and the acceptance suite.
BenchRecord run_bench_cell(const WorkloadSpec& spec, CacheGeometry cache,
                           std::uint32_t eps_num, std::uint32_t eps_den, bool timing);

extern const char* kCsvHeader;
void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows);

}  // namespace fsel::harness
