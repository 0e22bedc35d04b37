/*
   Copyright 2026 The maxgauss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "maxgauss/errors.hpp"

namespace maxgauss {

/// Closed interval; lo may be -inf and hi may be +inf (half-lines).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

/// Finite union of pairwise disjoint closed intervals with strictly
/// increasing endpoints. The empty list is the empty set. This is the
/// representable subfamily of real sets used throughout: every
/// distributional check works with half-lines (-inf, t], and finite
/// unions cover every test geometry.
class BorelSet {
 public:
  BorelSet() = default;

  explicit BorelSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    validate();
  }

  static BorelSet empty_set() { return BorelSet(); }

  static BorelSet whole_line() {
    return BorelSet({{-std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()}});
  }

  /// (-inf, t]
  static BorelSet half_line_below(double t) {
    return BorelSet({{-std::numeric_limits<double>::infinity(), t}});
  }

  /// [t, +inf)
  static BorelSet half_line_above(double t) {
    return BorelSet({{t, std::numeric_limits<double>::infinity()}});
  }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

  bool is_whole_line() const {
    return intervals_.size() == 1 && std::isinf(intervals_[0].lo) &&
           intervals_[0].lo < 0 && std::isinf(intervals_[0].hi) && intervals_[0].hi > 0;
  }

  bool contains(double t) const {
    // Binary search over interval starts.
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    --it;
    return t >= it->lo && t <= it->hi;
  }

 private:
  void validate() const {
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
      const Interval& iv = intervals_[k];
      if (std::isnan(iv.lo) || std::isnan(iv.hi))
        throw DomainError("BorelSet: NaN endpoint");
      if (!(iv.lo <= iv.hi))
        throw DomainError("BorelSet: interval with lo > hi");
      if (std::isinf(iv.lo) && iv.lo > 0)
        throw DomainError("BorelSet: lo must not be +inf");
      if (std::isinf(iv.hi) && iv.hi < 0)
        throw DomainError("BorelSet: hi must not be -inf");
      if (k > 0 && !(intervals_[k - 1].hi < iv.lo))
        throw DomainError("BorelSet: intervals must be disjoint with strictly "
                          "increasing endpoints (interval " + std::to_string(k) + ")");
    }
  }

  std::vector<Interval> intervals_;
};

/// t-enlargement: every interval widened by t on both sides, then
/// overlapping or touching intervals merged. Contains the input set.
inline BorelSet enlarge(const BorelSet& a, double t) {
  if (std::isnan(t) || t < 0.0) throw DomainError("enlarge: t must be >= 0");
  if (a.empty()) return a;
  std::vector<Interval> widened;
  widened.reserve(a.intervals().size());
  for (const Interval& iv : a.intervals()) {
    widened.push_back({iv.lo - t, iv.hi + t});
  }
  std::vector<Interval> merged;
  merged.push_back(widened.front());
  for (std::size_t k = 1; k < widened.size(); ++k) {
    if (widened[k].lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, widened[k].hi);
    } else {
      merged.push_back(widened[k]);
    }
  }
  return BorelSet(std::move(merged));
}

}  // namespace maxgauss
