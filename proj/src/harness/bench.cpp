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

#include "harness/bench.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "funnelselect/funnelselect.hpp"
#include "harness/metrics.hpp"
#include "harness/oracle.hpp"

namespace fsel::harness {

const char* kCsvHeader =
    "workload,n,q,M,B,entropy_B,entropy_IO,comparisons,misses,arena_hw,"
    "ratio_cmp,ratio_io,seed,wall_ms";

CacheGeometry parse_cache_geometry(const std::string& spec) {
  auto x = spec.find('x');
  if (x == std::string::npos)
    throw std::invalid_argument("cache geometry must be MxB, e.g. 4096x64");
  CacheGeometry g;
  g.m = std::stoull(spec.substr(0, x));
  g.b = std::stoull(spec.substr(x + 1));
  if (g.b < 1 || g.m <= g.b)
    throw std::invalid_argument("cache geometry requires M > B >= 1");
  return g;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bench config: " + path);
  nlohmann::json j;
  in >> j;

  BenchConfig config;
  if (j.contains("workloads")) {
    config.workloads.clear();
    for (const auto& w : j["workloads"]) config.workloads.push_back(parse_distribution(w));
  }
  if (j.contains("sizes")) {
    config.sizes.clear();
    for (const auto& s : j["sizes"]) config.sizes.push_back(s.get<std::uint64_t>());
  }
  if (j.contains("seeds")) {
    config.seeds.clear();
    for (const auto& s : j["seeds"]) config.seeds.push_back(s.get<std::uint64_t>());
  }
  if (j.contains("caches")) {
    config.caches.clear();
    for (const auto& c : j["caches"]) config.caches.push_back(parse_cache_geometry(c));
  }
  if (j.contains("duplicates")) config.duplicates = j["duplicates"].get<double>();
  if (j.contains("eps_num")) config.eps_num = j["eps_num"].get<std::uint32_t>();
  if (j.contains("eps_den")) config.eps_den = j["eps_den"].get<std::uint32_t>();
  if (j.contains("timing")) config.timing = j["timing"].get<bool>();
  return config;
}

BenchRecord run_bench_cell(const WorkloadSpec& spec, CacheGeometry cache,
                           std::uint32_t eps_num, std::uint32_t eps_den, bool timing) {
  Workload w = generate(spec);
  GapProfile profile = compute_gaps(w.queries);
  double entropy = query_rank_entropy(profile);
  double entropy_io_v = io_entropy(entropy, cache.m, cache.b);

  Config cfg;
  cfg.eps_num = eps_num;
  cfg.eps_den = eps_den;

  auto start = std::chrono::steady_clock::now();
  auto [report, metrics] = run_traced<Key>(
      Workspace<Key>::element_capacity_for(spec.n),
      Workspace<Key>::rank_capacity_for(w.queries.query_count()), cache.m, cache.b,
      [&](Workspace<Key>& ws) {
        return multiselect<Key>(ws, w.keys, w.queries.ranks, cfg);
      });
  auto stop = std::chrono::steady_clock::now();

  SelectionReport<Key> expected = oracle_multiselect<Key>(w.keys, w.queries.ranks);
  if (!reports_equal(report, expected))
    throw std::runtime_error("bench cell disagreed with the oracle (workload " +
                             std::string(distribution_name(spec.distribution)) +
                             ", n=" + std::to_string(spec.n) + ")");

  BenchRecord row;
  row.workload = distribution_name(spec.distribution);
  row.n = spec.n;
  row.q = w.queries.query_count();
  row.m = cache.m;
  row.b = cache.b;
  row.entropy = entropy;
  row.entropy_io = entropy_io_v;
  row.comparisons = metrics.comparisons;
  row.misses = metrics.misses;
  row.arena_high_water = metrics.arena_high_water;
  row.ratio_cmp = static_cast<double>(metrics.comparisons) /
                  (entropy + static_cast<double>(spec.n));
  row.ratio_io = static_cast<double>(metrics.misses) /
                 (entropy_io_v + static_cast<double>(spec.n) / static_cast<double>(cache.b));
  row.seed = spec.seed;
  row.wall_ms = timing
      ? std::chrono::duration<double, std::milli>(stop - start).count()
      : 0.0;
  return row;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  std::vector<BenchRecord> rows;
  for (Distribution dist : config.workloads) {
    for (std::uint64_t n : config.sizes) {
      for (std::uint64_t seed : config.seeds) {
        WorkloadSpec spec;
        spec.n = n;
        spec.distribution = dist;
        spec.seed = seed;
        spec.duplicates = config.duplicates;
        if (dist == Distribution::kUniform)
          spec.q = static_cast<std::uint64_t>(std::max<double>(
              1.0, std::floor(std::sqrt(static_cast<double>(n)))));
        if (dist == Distribution::kHead) spec.q = std::max<std::uint64_t>(1, n / 16);
        for (CacheGeometry cache : config.caches)
          rows.push_back(run_bench_cell(spec, cache, config.eps_num, config.eps_den,
                                        config.timing));
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << kCsvHeader << '\n';
  char buf[64];
  for (const BenchRecord& r : rows) {
    out << r.workload << ',' << r.n << ',' << r.q << ',' << r.m << ',' << r.b << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.entropy);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.entropy_io);
    out << buf << ',' << r.comparisons << ',' << r.misses << ',' << r.arena_high_water << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.ratio_cmp);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.ratio_io);
    out << buf << ',' << r.seed << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out << buf << '\n';
  }
}

}  // namespace fsel::harness
