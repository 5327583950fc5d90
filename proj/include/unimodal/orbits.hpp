#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "error.hpp"
#include "maps.hpp"
#include "numeric.hpp"

namespace unimodal {

inline constexpr double kCycleTol = 1e-10;

struct Cycle {
  std::vector<double> points;  // orbit order, rotated to start at the smallest point
  int period = 0;
  double multiplier = 0.0;

  bool repelling() const { return std::abs(multiplier) > 1.0; }
};

struct CriticalOrbit {
  std::vector<double> values;  // values[k-1] = c_k

  double operator[](int k) const { return values.at(static_cast<std::size_t>(k - 1)); }
  int size() const { return static_cast<int>(values.size()); }
};

inline CriticalOrbit critical_orbit(const PiecewiseMap& f, int n) {
  if (n < 1) throw Error(Errc::invalid_parameter, "critical orbit length must be >= 1");
  CriticalOrbit out;
  out.values.reserve(static_cast<std::size_t>(n));
  double x = f.critical();
  for (int i = 0; i < n; ++i) {
    x = f.eval(x);
    out.values.push_back(x);
  }
  return out;
}

inline void canonicalize(std::vector<double>& pts) {
  if (pts.empty()) return;
  auto it = std::min_element(pts.begin(), pts.end());
  std::rotate(pts.begin(), it, pts.end());
}

/// Product of the derivatives along the cycle. At a branch joint the slope of
/// the left branch is used (the same convention as eval).
inline double cycle_multiplier(const PiecewiseMap& f, const std::vector<double>& points) {
  double m = 1.0;
  for (double x : points) {
    if (std::abs(x - f.critical()) <= 1e-15)
      throw Error(Errc::critical_on_cycle, "multiplier undefined: cycle passes through c");
    m *= f.derivative(x);
  }
  return m;
}

inline double cycle_multiplier(const PiecewiseMap& f, const Cycle& cycle) {
  return cycle_multiplier(f, cycle.points);
}

/// Orbit of a periodic point with its minimal period (at most `period`).
inline Cycle make_cycle(const PiecewiseMap& f, double x0, int period) {
  int minimal = period;
  for (int d = 1; d < period; ++d) {
    if (period % d == 0 && std::abs(f.eval_n(x0, d) - x0) <= kCycleTol) {
      minimal = d;
      break;
    }
  }
  Cycle cyc;
  cyc.period = minimal;
  double x = x0;
  for (int i = 0; i < minimal; ++i) {
    cyc.points.push_back(x);
    x = f.eval(x);
  }
  cyc.multiplier = cycle_multiplier(f, cyc.points);
  canonicalize(cyc.points);
  return cyc;
}

/// The interior fixed point. Tent maps use the closed form s/(s+1).
inline double interior_fixed_point(const PiecewiseMap& f) {
  if (f.label().family == Family::tent) {
    double s = f.label().parameter;
    if (s <= 1.0) throw Error(Errc::no_fixed_point, "tent map with s <= 1 has no interior fixed point");
    return s / (s + 1.0);
  }
  auto g = [&f](double x) { return f.eval(x) - x; };
  const Interval d = f.domain();
  const double c = f.critical();
  if (g(c) > 0.0) {
    if (auto r = bisect(g, c, d.hi)) return *r;
  }
  double inner = d.lo + 1e-9 * d.length();
  if (g(inner) > 0.0 && g(c) < 0.0) {
    if (auto r = bisect(g, inner, c)) return *r;
  }
  throw Error(Errc::no_fixed_point, "no interior fixed point");
}

/// Bisection for f^period(x) = x on a bracket on which f^period is monotone.
inline Cycle find_cycle(const PiecewiseMap& f, int period, Interval bracket) {
  if (period < 1) throw Error(Errc::invalid_parameter, "period must be >= 1");
  Interval img = bracket;
  for (int j = 0; j < period; ++j) {
    if (img.interior_contains(f.critical()))
      throw Error(Errc::lap_straddle, "bracket straddles a lap boundary of the iterate");
    img = f.image(img);
  }
  auto g = [&](double x) { return f.eval_n(x, period) - x; };
  double glo = g(bracket.lo);
  double ghi = g(bracket.hi);
  if (glo != 0.0 && ghi != 0.0 && (glo > 0.0) == (ghi > 0.0))
    throw Error(Errc::no_sign_change, "f^period - id has no sign change on the bracket");
  auto root = bisect(g, bracket.lo, bracket.hi);
  if (!root) throw Error(Errc::no_sign_change, "bisection failed");
  return make_cycle(f, *root, period);
}

/// Largest cycle-closure error max_i |f(x_i) - x_{i+1}|.
inline double cycle_residual(const PiecewiseMap& f, const Cycle& cyc) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cyc.points.size(); ++i) {
    double next = cyc.points[(i + 1) % cyc.points.size()];
    worst = std::max(worst, std::abs(f.eval(cyc.points[i]) - next));
  }
  return worst;
}

}  // namespace unimodal
