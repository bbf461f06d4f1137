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
#include "harness/workload.hpp"

namespace fsel::harness {

// Key files are raw little-endian 64-bit unsigned integers, no header.
std::vector<Key> read_keys(const std::string& path);
void write_keys(const std::string& path, const std::vector<Key>& keys);

// Rank files are newline-delimited decimal integers, strictly increasing.
std::vector<rank_t> read_ranks(const std::string& path);
void write_ranks(const std::string& path, const std::vector<rank_t>& ranks);

// Comma-separated decimal list, e.g. "1,2,3,8".
std::vector<rank_t> parse_rank_list(const std::string& text);

}  // namespace fsel::harness
