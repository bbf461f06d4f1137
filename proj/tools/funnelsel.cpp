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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "funnelselect/funnelselect.hpp"
#include "harness/bench.hpp"
#include "harness/fuzz.hpp"
#include "harness/io.hpp"
#include "harness/metrics.hpp"
#include "harness/oracle.hpp"
#include "harness/workload.hpp"

namespace {

using namespace fsel;
using namespace fsel::harness;

// Decimal epsilon like "1", "0.5", "2.25" parsed as an exact rational.
void parse_epsilon(const std::string& text, Config& cfg) {
  auto dot = text.find('.');
  std::uint64_t num, den = 1;
  if (dot == std::string::npos) {
    num = std::stoull(text);
  } else {
    std::string head = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    num = head.empty() ? 0 : std::stoull(head);
    for (char c : frac) {
      if (c < '0' || c > '9') throw std::invalid_argument("--epsilon must be a decimal number");
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
      den *= 10;
    }
  }
  if (num == 0) throw std::invalid_argument("--epsilon must be positive");
  std::uint64_t g = std::gcd(num, den);
  cfg.eps_num = static_cast<std::uint32_t>(num / g);
  cfg.eps_den = static_cast<std::uint32_t>(den / g);
}

struct RunArgs {
  std::string input;
  std::string ranks;
  std::uint64_t n = 0;
  std::string epsilon = "1";
  std::vector<std::string> caches;
  std::string dump_trace;
  bool print_report = false;
  bool stats = false;
};

int cmd_run(const RunArgs& args) {
  std::vector<Key> keys;
  if (args.input.rfind("random:", 0) == 0) {
    if (args.n == 0) {
      std::cerr << "run: --n is required with --input random:<seed>\n";
      return 2;
    }
    std::mt19937_64 rng(std::stoull(args.input.substr(7)));
    keys.resize(args.n);
    for (auto& k : keys) k = rng() >> 1;
  } else {
    keys = read_keys(args.input);
    if (args.n != 0 && args.n < keys.size()) keys.resize(args.n);
  }

  std::vector<rank_t> ranks = args.ranks.rfind('@', 0) == 0
                                  ? read_ranks(args.ranks.substr(1))
                                  : parse_rank_list(args.ranks);

  Config cfg;
  parse_epsilon(args.epsilon, cfg);

  Workspace<Key> ws(Workspace<Key>::element_capacity_for(keys.size()),
                    Workspace<Key>::rank_capacity_for(ranks.size()));
  SelectionReport<Key> report = multiselect<Key>(ws, keys, ranks, cfg);

  for (const auto& e : report.entries) {
    if (args.print_report)
      std::printf("%llu\t%llu\n", static_cast<unsigned long long>(e.rank),
                  static_cast<unsigned long long>(e.value));
    else
      std::printf("%llu\n", static_cast<unsigned long long>(e.value));
  }

  if (args.stats) {
    GapProfile profile = compute_gaps({ranks, keys.size()});
    double entropy = query_rank_entropy(profile);
    std::fprintf(stderr, "n=%zu q=%zu entropy_B=%.3f comparisons=%llu\n", keys.size(),
                 ranks.size(), entropy,
                 static_cast<unsigned long long>(ws.comparisons.count));
    std::vector<std::string> caches = args.caches;
    if (caches.empty()) caches = {"4096x64"};
    for (const std::string& spec : caches) {
      CacheGeometry g = parse_cache_geometry(spec);
      auto [rep, metrics] = run_traced<Key>(
          Workspace<Key>::element_capacity_for(keys.size()),
          Workspace<Key>::rank_capacity_for(ranks.size()), g.m, g.b,
          [&](Workspace<Key>& tws) { return multiselect<Key>(tws, keys, ranks, cfg); });
      if (!reports_equal(rep, report)) {
        std::cerr << "run: traced rerun diverged\n";
        return 1;
      }
      std::fprintf(stderr, "M=%llu B=%llu misses=%llu entropy_IO=%.4f arena_hw=%llu\n",
                   static_cast<unsigned long long>(g.m), static_cast<unsigned long long>(g.b),
                   static_cast<unsigned long long>(metrics.misses),
                   io_entropy(entropy, g.m, g.b),
                   static_cast<unsigned long long>(metrics.arena_high_water));
    }
  }

  if (!args.dump_trace.empty()) {
    TraceWriter writer(args.dump_trace);
    Workspace<Key> tws(Workspace<Key>::element_capacity_for(keys.size()),
                       Workspace<Key>::rank_capacity_for(ranks.size()), nullptr, &writer);
    SelectionReport<Key> rep = multiselect<Key>(tws, keys, ranks, cfg);
    writer.flush();
    if (!reports_equal(rep, report)) {
      std::cerr << "run: trace-dump rerun diverged\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cache-oblivious multiple selection: run, fuzz, bench, gen"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "select ranks from one instance");
  run->add_option("--input", run_args.input, "key file or random:<seed>")->required();
  run->add_option("--ranks", run_args.ranks, "comma list or @file")->required();
  run->add_option("--n", run_args.n, "problem size (required for random input)");
  run->add_option("--epsilon", run_args.epsilon, "tall-cache epsilon (decimal)");
  run->add_option("--cache", run_args.caches, "MxB geometry for --stats (repeatable)");
  run->add_option("--dump-trace", run_args.dump_trace, "write the access trace to a file");
  run->add_flag("--print-report", run_args.print_report, "print rank<TAB>value lines");
  run->add_flag("--stats", run_args.stats, "print counters to stderr");

  FuzzOptions fuzz_options;
  std::string fuzz_cache = "4096x64";
  CLI::App* fuzz = app.add_subcommand("fuzz", "randomized oracle check");
  fuzz->add_option("--rounds", fuzz_options.rounds, "number of instances");
  fuzz->add_option("--max-n", fuzz_options.max_n, "largest instance size");
  fuzz->add_option("--seed", fuzz_options.seed, "random seed");
  fuzz->add_option("--cache", fuzz_cache, "MxB geometry for the traced run");

  std::string bench_config_path, bench_csv = "bench.csv";
  std::vector<std::string> bench_caches;
  bool bench_no_timing = false;
  CLI::App* bench = app.add_subcommand("bench", "scaling benchmark matrix to CSV");
  bench->add_option("--config", bench_config_path, "JSON config file");
  bench->add_option("--csv", bench_csv, "output CSV path")->required();
  bench->add_option("--cache", bench_caches, "MxB geometry (repeatable, overrides config)");
  bench->add_flag("--no-timing", bench_no_timing, "zero the wall_ms column");

  WorkloadSpec gen_spec;
  std::string gen_dist = "uniform", gen_out = "workload";
  CLI::App* gen = app.add_subcommand("gen", "emit a workload to <out>.keys/.ranks");
  gen->add_option("--n", gen_spec.n, "problem size")->required();
  gen->add_option("--dist", gen_dist, "single|uniform|clustered|head|sorting");
  gen->add_option("--q", gen_spec.q, "query count (where applicable)");
  gen->add_option("--seed", gen_spec.seed, "random seed");
  gen->add_option("--duplicates", gen_spec.duplicates, "duplicate key fraction [0,1]");
  gen->add_option("--out", gen_out, "output path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);

    if (fuzz->parsed()) {
      CacheGeometry g = parse_cache_geometry(fuzz_cache);
      fuzz_options.cache_m = g.m;
      fuzz_options.cache_b = g.b;
      FuzzOutcome out = run_fuzz(fuzz_options);
      if (out.pass) {
        std::printf("fuzz: PASS (%llu rounds)\n",
                    static_cast<unsigned long long>(out.rounds_run));
        return 0;
      }
      std::printf("fuzz: FAIL after %llu rounds: %s\n",
                  static_cast<unsigned long long>(out.rounds_run), out.message.c_str());
      return 1;
    }

    if (bench->parsed()) {
      BenchConfig config =
          bench_config_path.empty() ? BenchConfig{} : load_bench_config(bench_config_path);
      if (!bench_caches.empty()) {
        config.caches.clear();
        for (const std::string& spec : bench_caches)
          config.caches.push_back(parse_cache_geometry(spec));
      }
      if (bench_no_timing) config.timing = false;
      std::vector<BenchRecord> rows = run_bench(config);
      std::ofstream out(bench_csv);
      if (!out) {
        std::cerr << "bench: cannot open " << bench_csv << "\n";
        return 2;
      }
      write_csv(out, rows);
      std::printf("bench: wrote %zu rows to %s\n", rows.size(), bench_csv.c_str());
      return 0;
    }

    if (gen->parsed()) {
      gen_spec.distribution = parse_distribution(gen_dist);
      Workload w = generate(gen_spec);
      write_keys(gen_out + ".keys", w.keys);
      write_ranks(gen_out + ".ranks", w.queries.ranks);
      std::printf("gen: %s.keys (%zu keys), %s.ranks (%zu ranks)\n", gen_out.c_str(),
                  w.keys.size(), gen_out.c_str(), w.queries.ranks.size());
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
