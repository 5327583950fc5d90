#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace unimodal {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  bool contains(const Interval& o, double tol = 0.0) const {
    return o.lo >= lo - tol && o.hi <= hi + tol;
  }
  bool interior_contains(double x) const { return x > lo && x < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval hull(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }
inline Interval point_interval(double x) { return {x, x}; }

/// An interval with explicit endpoint membership; used where half-open sets
/// matter (level sets).
struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double x) const {
    bool above = lo_closed ? x >= lo : x > lo;
    bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
  }
  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

/// Sorts and merges intervals whose gap is at most `gap`.
inline std::vector<Interval> merge_intervals(std::vector<Interval> v, double gap = 0.0) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi + gap) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

inline double total_length(std::span<const Interval> v) {
  double t = 0.0;
  for (const auto& iv : v) t += iv.length();
  return t;
}

/// Distance from x to a finite union of closed intervals (inf when empty).
inline double distance(double x, std::span<const Interval> set) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& iv : set) {
    if (iv.contains(x)) return 0.0;
    d = std::min(d, x < iv.lo ? iv.lo - x : x - iv.hi);
  }
  return d;
}

/// sup_{a in A} dist(a, B) for finite unions of closed intervals. The distance
/// function to B is piecewise linear, so the supremum over each interval of A is
/// attained at one of its endpoints or at a midpoint of a gap of B inside it.
inline double directed_hausdorff(std::span<const Interval> a, std::span<const Interval> b) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  std::vector<Interval> bs(b.begin(), b.end());
  bs = merge_intervals(std::move(bs));
  double worst = 0.0;
  for (const auto& iv : a) {
    worst = std::max(worst, distance(iv.lo, bs));
    worst = std::max(worst, distance(iv.hi, bs));
    for (std::size_t k = 0; k + 1 < bs.size(); ++k) {
      double mid = 0.5 * (bs[k].hi + bs[k + 1].lo);
      if (iv.contains(mid)) worst = std::max(worst, distance(mid, bs));
    }
  }
  return worst;
}

inline double hausdorff(std::span<const Interval> a, std::span<const Interval> b) {
  if (a.empty() && b.empty()) return 0.0;
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

/// Removes the open intervals `holes` from the closed union `set`.
inline std::vector<Interval> subtract_open(std::vector<Interval> set,
                                           std::span<const Interval> holes) {
  for (const auto& hole : holes) {
    if (hole.hi <= hole.lo) continue;
    std::vector<Interval> next;
    next.reserve(set.size() + 1);
    for (const auto& iv : set) {
      if (hole.hi <= iv.lo || hole.lo >= iv.hi) {
        next.push_back(iv);
        continue;
      }
      if (hole.lo >= iv.lo) next.push_back({iv.lo, hole.lo});
      if (hole.hi <= iv.hi) next.push_back({hole.hi, iv.hi});
    }
    set = std::move(next);
  }
  return set;
}

}  // namespace unimodal
