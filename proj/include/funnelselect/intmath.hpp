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
#include <limits>

namespace fsel {

// 128-bit saturating arithmetic for the exact power comparisons used by the
// base-case predicate and the multi-partition precondition. Values that do
// not fit in 128 bits saturate; comparisons treat a saturated value as
// "at least 2^128 - 1", which keeps one-sided comparisons exact.
struct SatU128 {
  unsigned __int128 value = 0;
  bool saturated = false;
};

inline SatU128 sat_from(std::uint64_t v) { return SatU128{v, false}; }

inline SatU128 sat_mul(SatU128 a, SatU128 b) {
  if (a.saturated || b.saturated) return SatU128{0, true};
  if (a.value == 0 || b.value == 0) return SatU128{0, false};
  unsigned __int128 max = ~static_cast<unsigned __int128>(0);
  if (a.value > max / b.value) return SatU128{0, true};
  return SatU128{a.value * b.value, false};
}

inline SatU128 sat_pow(std::uint64_t base, unsigned exp) {
  SatU128 result = sat_from(1);
  SatU128 b = sat_from(base);
  while (exp > 0) {
    if (exp & 1u) result = sat_mul(result, b);
    exp >>= 1u;
    if (exp > 0) b = sat_mul(b, b);
  }
  return result;
}

// a >= b with saturation semantics. Comparing two saturated values is
// ambiguous; callers at realistic sizes never reach that case, and we
// resolve it as "greater-or-equal" (both are astronomically large).
inline bool sat_ge(SatU128 a, SatU128 b) {
  if (a.saturated) return true;
  if (b.saturated) return false;
  return a.value >= b.value;
}

inline std::uint64_t ceil_div_u64(std::uint64_t a, std::uint64_t b) {
  return a == 0 ? 0 : (a - 1) / b + 1;
}

// Smallest r >= 1 with r^d >= n.
inline std::uint64_t ceil_root(std::uint64_t n, unsigned d) {
  if (n <= 1 || d == 0) return 1;
  std::uint64_t lo = 1, hi = n;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (sat_ge(sat_pow(mid, d), sat_from(n)))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

// ceil(k^{d/2}) computed exactly as the smallest s with s^2 >= k^d.
inline std::uint64_t ceil_pow_half(std::uint64_t k, unsigned d) {
  if (k <= 1) return k;
  SatU128 target = sat_pow(k, d);
  std::uint64_t lo = 1, hi = std::uint64_t(1) << 63;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (sat_ge(sat_mul(sat_from(mid), sat_from(mid)), target))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace fsel
