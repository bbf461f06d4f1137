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

#include <algorithm>
#include <span>
#include <vector>

#include "funnelselect/core.hpp"
#include "funnelselect/funnelselect.hpp"

namespace fsel::harness {

// Reference answer: sort a copy, index at the query ranks.
template <typename T>
SelectionReport<T> oracle_multiselect(std::span<const T> elements, std::span<const rank_t> ranks) {
  std::vector<T> sorted(elements.begin(), elements.end());
  std::sort(sorted.begin(), sorted.end());
  SelectionReport<T> report;
  report.entries.reserve(ranks.size());
  for (rank_t r : ranks)
    report.entries.push_back(ReportEntry<T>{r, sorted[static_cast<std::size_t>(r - 1)]});
  return report;
}

template <typename T>
bool reports_equal(const SelectionReport<T>& a, const SelectionReport<T>& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    if (a.entries[i].rank != b.entries[i].rank || a.entries[i].value != b.entries[i].value)
      return false;
  return true;
}

}  // namespace fsel::harness
