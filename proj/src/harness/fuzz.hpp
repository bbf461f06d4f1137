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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "funnelselect/funnelselect.hpp"
#include "harness/workload.hpp"

namespace fsel::harness {

// Validates the recursion-structure properties along a run and records an
// event log for shape comparison:
//   (a) per call, the total mass of spawned subproblems stays below n/2;
//   (b) every subproblem has size <= delta - 2;
//   (c) every gap fully covered by a subproblem has size < the call's delta.
// Optionally checks, for distinct-key inputs, that no element from a
// top-level gap of size >= the top-level delta enters depth-1 recursion.
class CheckingObserver : public RecursionObserver<Key> {
 public:
  void set_top_gap_map(std::unordered_map<Key, std::uint64_t> key_to_gap_size,
                       std::uint64_t top_delta);

  void on_call(int depth, std::uint64_t n, const std::vector<rank_t>& local_ranks) override;
  void on_delta(int depth, std::uint64_t delta, bool sorting_case) override;
  void on_subproblem(int depth, rank_t r_min, rank_t r_max, std::uint64_t size,
                     const Key* data, std::uint64_t count) override;

  const std::vector<std::string>& violations() const { return violations_; }

  struct Event {
    std::uint8_t kind;  // 0 call, 1 delta, 2 subproblem
    int depth;
    std::uint64_t a, b, c;
  };
  const std::vector<Event>& events() const { return events_; }

  std::uint64_t max_depth() const { return max_depth_; }
  std::uint64_t subproblem_count() const { return subproblem_count_; }

 private:
  struct Frame {
    std::uint64_t n = 0;
    std::uint64_t delta = 0;
    std::uint64_t spawned_mass = 0;
    bool sorting = false;
    std::vector<rank_t> ranks;
  };

  std::vector<Frame> stack_;
  std::vector<std::string> violations_;
  std::vector<Event> events_;
  std::unordered_map<Key, std::uint64_t> top_gap_size_;
  std::uint64_t top_delta_ = 0;
  bool tag_check_ = false;
  std::uint64_t max_depth_ = 0;
  std::uint64_t subproblem_count_ = 0;
};

struct FuzzOptions {
  std::uint64_t rounds = 1000;
  std::uint64_t max_n = 4096;
  std::uint64_t seed = 1;
  std::uint64_t cache_m = 4096;
  std::uint64_t cache_b = 64;
  bool compare_untraced = true;  // obliviousness guard per round
};

struct FuzzCase {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  int key_variant = 0;
  int rank_variant = 0;
};

struct FuzzOutcome {
  bool pass = true;
  std::uint64_t rounds_run = 0;
  std::string message;
  bool has_reproducer = false;
  FuzzCase reproducer;
};

// Algorithm under test; the default forwards to multiselect. Swappable so
// the fuzzer's detection and shrinking can themselves be tested against a
// deliberately broken implementation.
using AlgorithmFn = std::function<SelectionReport<Key>(
    Workspace<Key>&, std::span<const Key>, std::span<const rank_t>, const Config&,
    RecursionObserver<Key>*)>;

AlgorithmFn default_algorithm();

// Builds the deterministic instance for a case (keys + sorted ranks).
void build_instance(const FuzzCase& c, std::vector<Key>& keys, std::vector<rank_t>& ranks);

// Runs one instance through every check; empty result means pass.
std::optional<std::string> run_instance(const FuzzCase& c, const FuzzOptions& opt,
                                        const AlgorithmFn& alg);

FuzzOutcome run_fuzz(const FuzzOptions& opt, const AlgorithmFn& alg = default_algorithm());

std::string describe_case(const FuzzCase& c);

}  // namespace fsel::harness
