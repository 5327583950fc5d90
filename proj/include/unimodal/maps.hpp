#pragma once

// Piecewise-monotone interval maps: the tent, logistic and u_mu families share
// one representation (an ordered list of affine or logistic-type branches), so
// every downstream module works on `PiecewiseMap` alone.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "interval.hpp"
#include "numeric.hpp"

namespace unimodal {

inline constexpr double kJointTol = 1e-9;
inline constexpr double kInverseTol = 1e-12;
inline constexpr double kTuLogisticParameter = 3.854;

enum class Direction { increasing, decreasing };

/// y = slope * x + intercept
struct Affine {
  double slope = 0.0;
  double intercept = 0.0;
};

/// y = k * x * (1 - x)
struct Quadratic {
  double k = 0.0;
};

using Shape = std::variant<Affine, Quadratic>;

struct Branch {
  Interval domain;
  Shape shape;
  Direction direction = Direction::increasing;

  double eval(double x) const {
    if (const auto* a = std::get_if<Affine>(&shape)) return a->slope * x + a->intercept;
    const auto& q = std::get<Quadratic>(shape);
    return q.k * x * (1.0 - x);
  }

  double derivative(double x) const {
    if (const auto* a = std::get_if<Affine>(&shape)) return a->slope;
    return std::get<Quadratic>(shape).k * (1.0 - 2.0 * x);
  }

  Interval image() const { return hull(eval(domain.lo), eval(domain.hi)); }

  /// Solves eval(x) = y on this branch. Values that miss the image by at most
  /// kInverseTol are clamped onto the nearest endpoint.
  std::optional<double> invert(double y) const {
    Interval img = image();
    double scale = std::max(1.0, std::abs(y));
    if (y < img.lo - kInverseTol * scale || y > img.hi + kInverseTol * scale) return std::nullopt;
    double x;
    if (const auto* a = std::get_if<Affine>(&shape)) {
      if (a->slope == 0.0) return std::nullopt;
      x = (y - a->intercept) / a->slope;
    } else {
      double k = std::get<Quadratic>(shape).k;
      if (k == 0.0) return std::nullopt;
      double disc = std::max(0.0, 1.0 - 4.0 * y / k);
      // Small root in the cancellation-free form; the large one by symmetry.
      double small = 2.0 * (y / k) / (1.0 + std::sqrt(disc));
      x = domain.hi <= 0.5 ? small : 1.0 - small;
    }
    return std::clamp(x, domain.lo, domain.hi);
  }

  double max_abs_slope() const {
    return std::max(std::abs(derivative(domain.lo)), std::abs(derivative(domain.hi)));
  }
};

enum class Family { tent, logistic, tu, custom };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::tent: return "tent";
    case Family::logistic: return "logistic";
    case Family::tu: return "tu";
    case Family::custom: return "custom";
  }
  return "custom";
}

struct MapLabel {
  Family family = Family::custom;
  double parameter = 0.0;
  std::string note;
};

enum class Side { left, right };

class PiecewiseMap {
 public:
  /// Checks that the branches tile the domain and agree at every joint
  /// within kJointTol. Unimodality itself is a separate verdict (is_unimodal).
  PiecewiseMap(std::vector<Branch> branches, double critical, MapLabel label)
      : branches_(std::move(branches)), critical_(critical), label_(std::move(label)) {
    if (branches_.empty()) throw Error(Errc::invalid_parameter, "map needs at least one branch");
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      const auto& b = branches_[i];
      if (!(b.domain.lo < b.domain.hi) || !std::isfinite(b.domain.lo) || !std::isfinite(b.domain.hi))
        throw Error(Errc::invalid_parameter, "branch domain must be a finite nondegenerate interval");
      if (i > 0) {
        const auto& prev = branches_[i - 1];
        if (prev.domain.hi != b.domain.lo)
          throw Error(Errc::invalid_parameter, "branches must partition the domain");
        double gap = std::abs(prev.eval(b.domain.lo) - b.eval(b.domain.lo));
        if (gap > kJointTol) {
          std::ostringstream os;
          os << "discontinuity " << gap << " at x=" << b.domain.lo;
          throw Error(Errc::continuity, os.str());
        }
      }
    }
    domain_ = {branches_.front().domain.lo, branches_.back().domain.hi};
    if (!(critical_ > domain_.lo && critical_ < domain_.hi))
      throw Error(Errc::invalid_parameter, "critical point must lie inside the domain");
  }

  const std::vector<Branch>& branches() const { return branches_; }
  Interval domain() const { return domain_; }
  double critical() const { return critical_; }
  const MapLabel& label() const { return label_; }

  /// Index of the branch used at x; a joint belongs to the branch on its left.
  std::size_t branch_index(double x) const {
    auto it = std::lower_bound(branches_.begin(), branches_.end(), x,
                               [](const Branch& b, double v) { return b.domain.hi < v; });
    if (it == branches_.end()) --it;
    return static_cast<std::size_t>(it - branches_.begin());
  }

  double operator()(double x) const { return eval(x); }

  double eval(double x) const {
    if (x < domain_.lo || x > domain_.hi) {
      if (x >= domain_.lo - kInverseTol && x <= domain_.hi + kInverseTol) {
        x = std::clamp(x, domain_.lo, domain_.hi);
      } else {
        std::ostringstream os;
        os << "x=" << x << " outside [" << domain_.lo << ", " << domain_.hi << "]";
        throw Error(Errc::out_of_domain, os.str());
      }
    }
    return branches_[branch_index(x)].eval(x);
  }

  double eval_n(double x, int n) const {
    for (int i = 0; i < n; ++i) x = eval(x);
    return x;
  }

  double derivative(double x) const { return branches_[branch_index(x)].derivative(x); }

  double peak() const { return eval(critical_); }

  double lipschitz() const {
    double l = 0.0;
    for (const auto& b : branches_) l = std::max(l, b.max_abs_slope());
    return l;
  }

  /// Exact image of an interval: f is monotone on each side of c.
  Interval image(Interval j) const {
    double a = eval(j.lo);
    double b = eval(j.hi);
    if (j.lo < critical_ && j.hi > critical_) return {std::min(a, b), peak()};
    return hull(a, b);
  }

  /// Solution of f(x) = y on one monotone side of c, if any.
  std::optional<double> invert_on_side(double y, Side side) const {
    for (const auto& b : branches_) {
      bool on_side = side == Side::left ? b.domain.hi <= critical_ : b.domain.lo >= critical_;
      if (!on_side) continue;
      if (auto x = b.invert(y)) return x;
    }
    return std::nullopt;
  }

 private:
  std::vector<Branch> branches_;
  double critical_;
  MapLabel label_;
  Interval domain_;
};

inline double eval(const PiecewiseMap& f, double x) { return f.eval(x); }
inline double eval_n(const PiecewiseMap& f, double x, int n) { return f.eval_n(x, n); }

namespace detail {

inline Direction direction_of(const Branch& b, double critical) {
  double a = b.eval(b.domain.lo);
  double z = b.eval(b.domain.hi);
  if (z > a) return Direction::increasing;
  if (z < a) return Direction::decreasing;
  return b.domain.hi <= critical ? Direction::increasing : Direction::decreasing;
}

inline Branch make_branch(Interval dom, Shape shape, double critical) {
  Branch b{dom, shape, Direction::increasing};
  b.direction = direction_of(b, critical);
  return b;
}

inline Affine affine_through(double x0, double y0, double x1, double y1) {
  double slope = (y1 - y0) / (x1 - x0);
  return {slope, y0 - slope * x0};
}

inline Affine scaled(Affine a, double mu) { return {a.slope * mu, a.intercept * mu}; }

/// The period-3 skeleton of the logistic map at kTuLogisticParameter: boundary
/// cycle p1 -> p2 -> p3 of the outer cyclic trapping region and the conjugate
/// endpoints q1, q2, q3 with f(q2) = q3, f(q3) = q1.
struct TuSkeleton {
  double p1, p2, p3;
  double q1, q2, q3;
  double peak;
};

inline TuSkeleton build_tu_skeleton() {
  const double k = kTuLogisticParameter;
  auto l = [k](double x) { return k * x * (1.0 - x); };
  auto l3 = [&](double x) { return l(l(l(x))) - x; };

  // Regular (positive multiplier) period-3 orbit whose point nearest c lies
  // to the right of c: that point is p1 and [1 - p1, p1] contains c.
  std::optional<double> p1;
  const int samples = 20000;
  for (int i = 0; i < samples; ++i) {
    double a = 0.5 + 0.5 * i / samples;
    double b = 0.5 + 0.5 * (i + 1) / samples;
    auto root = bisect(l3, a, b, 1e-15);
    if (!root) continue;
    double x0 = *root;
    if (std::abs(l(x0) - x0) < 1e-6) continue;  // fixed point, not period 3
    double orbit[3] = {x0, l(x0), l(l(x0))};
    double mult = 1.0;
    double nearest = orbit[0];
    for (double o : orbit) {
      mult *= k * (1.0 - 2.0 * o);
      if (std::abs(o - 0.5) < std::abs(nearest - 0.5)) nearest = o;
    }
    if (mult > 0.0 && nearest > 0.5) {
      p1 = nearest;
      break;
    }
  }
  if (!p1) throw Error(Errc::bracket_failed, "period-3 boundary cycle of the logistic map not bracketed");

  TuSkeleton sk{};
  sk.p1 = *p1;
  sk.p2 = l(sk.p1);
  sk.p3 = l(sk.p2);
  sk.q1 = 1.0 - sk.p1;
  double disc3 = std::sqrt(1.0 - 4.0 * sk.q1 / k);
  sk.q3 = 2.0 * (sk.q1 / k) / (1.0 + disc3);
  double disc2 = std::sqrt(1.0 - 4.0 * sk.q3 / k);
  sk.q2 = 1.0 - 2.0 * (sk.q3 / k) / (1.0 + disc2);
  sk.peak = l(0.5);
  if (!(sk.q3 < sk.p3 && sk.p3 < sk.q1 && sk.q1 < 0.5 && 0.5 < sk.p1 && sk.p1 < sk.p2 &&
        sk.p2 < sk.q2 && sk.peak <= sk.q2))
    throw Error(Errc::bracket_failed, "period-3 skeleton has unexpected ordering");
  return sk;
}

inline const TuSkeleton& tu_skeleton() {
  static const TuSkeleton sk = build_tu_skeleton();
  return sk;
}

}  // namespace detail

/// T_s(x) = s (1 - |1 - 2x|) / 2 on [0, 1].
inline PiecewiseMap make_tent(double s) {
  if (!(s > 0.0 && s <= 2.0)) throw Error(Errc::invalid_parameter, "tent parameter must lie in (0, 2]");
  std::vector<Branch> br{
      {{0.0, 0.5}, Affine{s, 0.0}, Direction::increasing},
      {{0.5, 1.0}, Affine{-s, s}, Direction::decreasing},
  };
  return PiecewiseMap(std::move(br), 0.5, {Family::tent, s, ""});
}

inline PiecewiseMap make_logistic(double mu) {
  if (!(mu > 0.0 && mu <= 4.0)) throw Error(Errc::invalid_parameter, "logistic parameter must lie in (0, 4]");
  std::vector<Branch> br{
      {{0.0, 0.5}, Quadratic{mu}, Direction::increasing},
      {{0.5, 1.0}, Quadratic{mu}, Direction::decreasing},
  };
  return PiecewiseMap(std::move(br), 0.5, {Family::logistic, mu, ""});
}

inline double tu_mu_max() { return 4.0 / kTuLogisticParameter; }

/// u_mu = mu * F, where F agrees with the logistic map at 3.854 outside the
/// period-3 cyclic trapping region J1 = [q1, p1], J2 = [p2, q2], J3 = [q3, p3],
/// is affine on J2 and J3, and is a symmetric tent on J1 with F(c) = l(c).
inline PiecewiseMap make_tu(double mu) {
  if (!(mu >= 0.0 && mu <= tu_mu_max()))
    throw Error(Errc::invalid_parameter, "u_mu parameter must lie in [0, 4/3.854]");
  const auto& sk = detail::tu_skeleton();
  const double k = kTuLogisticParameter;
  auto l = [k](double x) { return k * x * (1.0 - x); };
  const double c = 0.5;

  // Affine pieces interpolate the logistic values at their joints, which keeps
  // F continuous up to rounding.
  Affine j3 = detail::affine_through(sk.q3, l(sk.q3), sk.p3, l(sk.p3));
  Affine j1_left = detail::affine_through(sk.q1, l(sk.q1), c, sk.peak);
  Affine j1_right = detail::affine_through(c, sk.peak, sk.p1, l(sk.p1));
  Affine j2 = detail::affine_through(sk.p2, l(sk.p2), sk.q2, l(sk.q2));

  std::vector<Branch> br{
      detail::make_branch({0.0, sk.q3}, Quadratic{k * mu}, c),
      detail::make_branch({sk.q3, sk.p3}, detail::scaled(j3, mu), c),
      detail::make_branch({sk.p3, sk.q1}, Quadratic{k * mu}, c),
      detail::make_branch({sk.q1, c}, detail::scaled(j1_left, mu), c),
      detail::make_branch({c, sk.p1}, detail::scaled(j1_right, mu), c),
      detail::make_branch({sk.p1, sk.p2}, Quadratic{k * mu}, c),
      detail::make_branch({sk.p2, sk.q2}, detail::scaled(j2, mu), c),
      detail::make_branch({sk.q2, 1.0}, Quadratic{k * mu}, c),
  };
  std::ostringstream note;
  note.precision(17);
  note << "p1=" << sk.p1 << " (regular period-3 point right of c)";
  return PiecewiseMap(std::move(br), c, {Family::tu, mu, note.str()});
}

/// All solutions of f(x) = y, sorted; duplicates at joints are merged.
inline std::vector<double> preimages(const PiecewiseMap& f, double y) {
  std::vector<double> out;
  for (const auto& b : f.branches()) {
    if (auto x = b.invert(y)) out.push_back(*x);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double x : out) {
    if (merged.empty() || x - merged.back() > kInverseTol) merged.push_back(x);
  }
  return merged;
}

/// The other solution of f(x) = f(p).
inline double conjugate(const PiecewiseMap& f, double p) {
  if (p == f.critical()) throw Error(Errc::invalid_parameter, "the critical point has no conjugate");
  Side other = p < f.critical() ? Side::right : Side::left;
  auto x = f.invert_on_side(f.eval(p), other);
  if (!x) throw Error(Errc::out_of_domain, "conjugate not found on the opposite lap");
  return *x;
}

/// Up to two intervals whose union is f^{-1}(j).
inline std::vector<Interval> interval_preimage(const PiecewiseMap& f, Interval j) {
  std::vector<Interval> out;
  const double c = f.critical();
  const double top = f.peak();
  for (Side side : {Side::left, Side::right}) {
    double end = side == Side::left ? f.domain().lo : f.domain().hi;
    Interval lap_image = hull(f.eval(end), top);
    double lo = std::max(j.lo, lap_image.lo);
    double hi = std::min(j.hi, lap_image.hi);
    if (lo > hi) continue;
    auto a = f.invert_on_side(lo, side);
    auto b = f.invert_on_side(hi, side);
    if (!a || !b) continue;
    Interval iv = hull(*a, *b);
    if (side == Side::left) iv.hi = std::min(iv.hi, c);
    else iv.lo = std::max(iv.lo, c);
    out.push_back(iv);
  }
  return out;
}

struct UnimodalVerdict {
  bool ok = true;
  std::optional<double> violation_at;
  std::string reason;
};

/// Probe-based check of the unimodal definition with c a maximum:
/// strictly increasing on [a, c], strictly decreasing on [c, b], f(a) = f(b) = a
/// and f([a, b]) within [a, b].
inline UnimodalVerdict is_unimodal(const PiecewiseMap& f, int probes = 10000) {
  const Interval d = f.domain();
  const double c = f.critical();
  auto fail = [](double x, std::string why) { return UnimodalVerdict{false, x, std::move(why)}; };

  if (std::abs(f.eval(d.lo) - d.lo) > kJointTol) return fail(d.lo, "f(a) != a");
  if (std::abs(f.eval(d.hi) - d.lo) > kJointTol) return fail(d.hi, "f(b) != a");

  double prev_x = d.lo;
  double prev_y = f.eval(d.lo);
  for (int i = 1; i <= probes; ++i) {
    double x = d.lo + (d.hi - d.lo) * i / probes;
    double y = f.eval(x);
    if (y > d.hi + kJointTol || y < d.lo - kJointTol) return fail(x, "image leaves the domain");
    // Pairs straddling c are compared against c itself.
    if (prev_x < c && x > c) {
      double yc = f.eval(c);
      if (!(yc > prev_y)) return fail(prev_x, "not strictly increasing left of c");
      if (!(y < yc)) return fail(x, "not strictly decreasing right of c");
    } else if (x <= c) {
      if (!(y > prev_y)) return fail(x, "not strictly increasing left of c");
    } else {
      if (!(y < prev_y)) return fail(x, "not strictly decreasing right of c");
    }
    prev_x = x;
    prev_y = y;
  }
  return {};
}

}  // namespace unimodal
