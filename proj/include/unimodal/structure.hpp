#pragma once

// Node tower, trapping regions, cores and level sets of tent maps (closed form
// through renormalization), plus the Cantor-repellor side of the u_mu family.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "error.hpp"
#include "interval.hpp"
#include "maps.hpp"
#include "numeric.hpp"
#include "orbits.hpp"

namespace unimodal {

inline constexpr int kMaxDepth = 60;
// Largest p whose nodes are materialized point by point (2^20 cycle points).
inline constexpr int kMaxMaterializedDepth = 21;
inline constexpr double kRegionTol = 1e-9;
inline constexpr double kSquareSnap = 1e-12;

inline void require_tent_parameter(double s) {
  if (!std::isfinite(s) || s <= 1.0 || s > 2.0)
    throw Error(Errc::invalid_parameter, "tent parameter must lie in (1, 2]");
}

/// p = 0 for s = 2, otherwise the p >= 1 with 2^-p <= log2 s < 2^(1-p).
/// Equivalently the number of squarings s, s^2, s^4, ... before reaching 2.
inline int node_depth(double s) {
  require_tent_parameter(s);
  if (s == 2.0) return 0;
  int p = 1;
  double sigma = s;
  while (sigma * sigma < 2.0 - kSquareSnap) {
    sigma *= sigma;
    if (++p > kMaxDepth) throw Error(Errc::invalid_parameter, "node depth exceeds 60");
  }
  return p;
}

struct AffineChart {
  double scale = 1.0;
  double offset = 0.0;

  double operator()(double x) const { return scale * x + offset; }
  double inverse(double y) const { return (y - offset) / scale; }
  /// next ∘ this
  AffineChart then(const AffineChart& next) const {
    return {next.scale * scale, next.scale * offset + next.offset};
  }
};

struct Renormalization {
  double sigma = 0.0;     // parameter of the outer tent
  double sigma_sq = 0.0;  // parameter of the conjugate inner tent
  Interval domain;        // [c2, pi] where f^2 is considered
  AffineChart chart;      // h(y) = (pi - y) / (2 (pi - 1/2))
  double residual = 0.0;  // sup |h(f^2(y)) - T_{sigma^2}(h(y))| over the probe
};

inline double snapped_square(double sigma) {
  double sq = sigma * sigma;
  if (std::abs(sq - 2.0) <= kSquareSnap) sq = 2.0;
  return sq;
}

/// f^2 on [c2, pi] is conjugate to T_{s^2} by the orientation-reversing chart
/// sending pi to 0 and c to 1/2. Requires 1 < s <= sqrt 2.
inline Renormalization renormalize(const PiecewiseMap& f, int probes = 1000) {
  if (f.label().family != Family::tent)
    throw Error(Errc::not_renormalizable, "renormalization is implemented for tent maps only");
  double s = f.label().parameter;
  if (s <= 1.0) throw Error(Errc::invalid_parameter, "tent parameter must exceed 1");
  double sq = snapped_square(s);
  if (sq > 2.0) throw Error(Errc::not_renormalizable, "s > sqrt 2: the core is not split by pi");

  double pi = interior_fixed_point(f);
  double c2 = f.eval(f.eval(f.critical()));
  double denom = 2.0 * (pi - 0.5);
  Renormalization r;
  r.sigma = s;
  r.sigma_sq = sq;
  r.domain = {c2, pi};
  r.chart = {-1.0 / denom, pi / denom};

  auto inner = make_tent(sq);
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    double y = c2 + (pi - c2) * i / (probes - 1);
    double lhs = r.chart(f.eval(f.eval(y)));
    double rhs = inner.eval(std::clamp(r.chart(y), 0.0, 1.0));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  r.residual = worst;
  if (worst > 1e-9) throw Error(Errc::commutation_failed, "chart does not conjugate f^2 to T_{s^2}");
  return r;
}

inline Renormalization renormalize(double s, int probes = 1000) {
  return renormalize(make_tent(s), probes);
}

/// Renormalizations of T_s, T_{s^2}, ... with the accumulated charts
/// H_{k+1} = h_k ∘ H_k from original to level-(k+1) coordinates.
struct RenormalizationLevel {
  Renormalization step;
  AffineChart to_level;  // H_k: original coordinates -> coordinates of this level
};

inline std::vector<RenormalizationLevel> renormalization_chain(double s, int count) {
  std::vector<RenormalizationLevel> out;
  AffineChart acc;
  double sigma = s;
  for (int k = 0; k < count; ++k) {
    auto r = renormalize(sigma);
    out.push_back({r, acc});
    acc = acc.then(r.chart);
    sigma = r.sigma_sq;
  }
  return out;
}

enum class NodeKind { boundary_fixed, repelling_cycle, interval_cycle_attractor, cantor_repellor };

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::boundary_fixed: return "boundary_fixed";
    case NodeKind::repelling_cycle: return "repelling_cycle";
    case NodeKind::interval_cycle_attractor: return "interval_cycle_attractor";
    case NodeKind::cantor_repellor: return "cantor_repellor";
  }
  return "?";
}

struct Node {
  int index = 0;
  NodeKind kind = NodeKind::boundary_fixed;
  std::vector<Interval> support;  // points are degenerate intervals
  std::optional<Cycle> cycle;     // the cycle for repellors, gamma for Cantor nodes

  bool is_attractor() const { return kind == NodeKind::interval_cycle_attractor; }
};

/// Cycle of intervals hull(c_j, c_{j+r}), j = 1..r, listed from the one
/// containing c: first hull(c_r, c_2r), then hull(c_{i-1}, c_{i-1+r}).
inline std::vector<Interval> core_from_orbit(const CriticalOrbit& orbit, int r) {
  if (orbit.size() < 2 * r) throw Error(Errc::invalid_parameter, "critical orbit too short");
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(r));
  out.push_back(hull(orbit[r], orbit[2 * r]));
  for (int i = 2; i <= r; ++i) out.push_back(hull(orbit[i - 1], orbit[i - 1 + r]));
  return out;
}

inline std::vector<Interval> sorted_by_position(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return v;
}

inline int checked_depth_for_materialization(double s) {
  int p = node_depth(s);
  if (p > kMaxMaterializedDepth)
    throw Error(Errc::invalid_parameter, "node cycles longer than 2^20 points are not materialized");
  return p;
}

/// N_0 = {0}; N_k (0 < k < p) the period-2^(k-1) cascade cycle; N_p the
/// attracting cycle of 2^(p-1) intervals. s = 2 has the single node [0, 1].
inline std::vector<Node> analytic_nodes(double s) {
  int p = checked_depth_for_materialization(s);
  auto f = make_tent(s);
  if (p == 0) return {Node{0, NodeKind::interval_cycle_attractor, {{0.0, 1.0}}, std::nullopt}};

  std::vector<Node> nodes;
  nodes.push_back(Node{0, NodeKind::boundary_fixed, {point_interval(0.0)}, make_cycle(f, 0.0, 1)});

  auto chain = renormalization_chain(s, p - 1);
  for (int k = 1; k < p; ++k) {
    const auto& lvl = chain[static_cast<std::size_t>(k - 1)];
    double sigma = lvl.step.sigma;
    double x0 = lvl.to_level.inverse(sigma / (sigma + 1.0));
    int period = 1 << (k - 1);
    Cycle cyc = make_cycle(f, x0, period);
    Node n{k, NodeKind::repelling_cycle, {}, cyc};
    std::vector<double> pts = cyc.points;
    std::sort(pts.begin(), pts.end());
    for (double x : pts) n.support.push_back(point_interval(x));
    nodes.push_back(std::move(n));
  }

  int r = 1 << (p - 1);
  auto orbit = critical_orbit(f, 2 * r);
  nodes.push_back(Node{p, NodeKind::interval_cycle_attractor, sorted_by_position(core_from_orbit(orbit, r)),
                       std::nullopt});
  return nodes;
}

struct TrappingRegion {
  std::vector<Interval> intervals;  // J_1 first; c lies in J_1
  int period = 0;
  bool cyclic = false;
  bool flip = false;  // period is twice the period of gamma
  std::optional<Cycle> gamma;
};

/// J_1's endpoints are conjugate and one of them is periodic (within 1e-9).
inline bool is_cyclic(const PiecewiseMap& f, const TrappingRegion& tr) {
  if (tr.intervals.empty()) return false;
  const Interval j1 = tr.intervals.front();
  if (!(j1.lo < f.critical() && j1.hi > f.critical())) return false;
  if (std::abs(f.eval(j1.lo) - f.eval(j1.hi)) > kRegionTol) return false;
  int limit = std::max(1, tr.period);
  for (double e : {j1.lo, j1.hi}) {
    double x = e;
    for (int k = 1; k <= limit; ++k) {
      x = f.eval(x);
      if (std::abs(x - e) <= kRegionTol) return true;
    }
  }
  return false;
}

/// The maximal trapping region of a repelling node: J_1 spans the node point
/// nearest c and its conjugate; J_2..J_r are the pullbacks of J_1 along the
/// forward images of J_1, so f(J_i) ⊆ J_{i+1} and f(J_r) ⊆ J_1.
inline TrappingRegion trapping_region(const PiecewiseMap& f, const Node& node) {
  if (node.is_attractor()) throw Error(Errc::attractor_node, "the attractor has no trapping region of its own");
  if (!node.cycle) throw Error(Errc::invalid_parameter, "node carries no cycle");
  const Cycle& cyc = *node.cycle;
  const double c = f.critical();

  double p1 = cyc.points.front();
  for (double x : cyc.points)
    if (std::abs(x - c) < std::abs(p1 - c)) p1 = x;
  Interval j1 = hull(p1, conjugate(f, p1));

  std::vector<Interval> forward{j1};
  const int limit = 2 * cyc.period + 1;
  int r = 0;
  for (int i = 1; i <= limit; ++i) {
    Interval next = f.image(forward.back());
    if (j1.contains(next, kRegionTol)) {
      r = i;
      break;
    }
    if (next.interior_contains(c))
      throw Error(Errc::timeout, "forward image of J_1 covers c before returning: region is not trapping");
    forward.push_back(next);
  }
  if (r == 0) throw Error(Errc::timeout, "forward images of J_1 do not return into J_1");

  std::vector<Interval> js(static_cast<std::size_t>(r));
  js[0] = j1;
  Interval target = j1;
  for (int i = r; i >= 2; --i) {
    const Interval fi = forward[static_cast<std::size_t>(i - 1)];
    auto pre = interval_preimage(f, target);
    std::optional<Interval> pick;
    for (const auto& iv : pre)
      if (iv.contains(fi.midpoint(), kRegionTol)) pick = iv;
    if (!pick) throw Error(Errc::timeout, "pullback of the trapping region lost its forward image");
    js[static_cast<std::size_t>(i - 1)] = *pick;
    target = *pick;
  }

  TrappingRegion tr;
  tr.intervals = std::move(js);
  tr.period = r;
  tr.gamma = cyc;
  tr.flip = r == 2 * cyc.period;
  tr.cyclic = is_cyclic(f, tr);
  return tr;
}

struct CoreCollection {
  std::vector<Interval> intervals;  // aligned with the J_i of the trapping region
  bool strictly_interior = true;    // false marks the last node before the attractor degenerates
};

inline CoreCollection core_of_node(const PiecewiseMap& f, const Node& node) {
  auto tr = trapping_region(f, node);
  auto orbit = critical_orbit(f, 2 * tr.period);
  CoreCollection cc;
  cc.intervals = core_from_orbit(orbit, tr.period);
  for (std::size_t i = 0; i < cc.intervals.size(); ++i) {
    const auto& k = cc.intervals[i];
    const auto& j = tr.intervals[i];
    if (!(k.lo > j.lo && k.hi < j.hi)) cc.strictly_interior = false;
  }
  return cc;
}

/// Closed-form cores K(N_k) of T_s from its critical orbit (r_k = 2^k).
inline std::vector<Interval> tent_core(const CriticalOrbit& orbit, int k) {
  return sorted_by_position(core_from_orbit(orbit, 1 << k));
}

struct LevelPartition {
  int p = 0;
  std::map<int, std::vector<Segment>> levels;  // k = -1 .. p

  int classify(double x) const {
    for (const auto& [k, segs] : levels)
      for (const auto& seg : segs)
        if (seg.contains(x)) return k;
    throw Error(Errc::out_of_domain, "point not covered by the level partition");
  }
};

namespace detail {

/// Closed interval minus a union of closed intervals, as half-open pieces.
inline std::vector<Segment> subtract_closed(Interval a, const std::vector<Interval>& holes) {
  std::vector<Segment> pieces{{a.lo, a.hi, true, true}};
  for (const auto& h : holes) {
    std::vector<Segment> next;
    for (const auto& s : pieces) {
      if (h.hi < s.lo || h.lo > s.hi) {
        next.push_back(s);
        continue;
      }
      Segment left{s.lo, h.lo, s.lo_closed, false};
      Segment right{h.hi, s.hi, false, s.hi_closed};
      if (!left.empty()) next.push_back(left);
      if (!right.empty()) next.push_back(right);
    }
    pieces = std::move(next);
  }
  return pieces;
}

}  // namespace detail

inline LevelPartition level_partition(double s) {
  int p = checked_depth_for_materialization(s);
  LevelPartition lp;
  lp.p = p;
  if (p == 0) {
    lp.levels[-1] = {};
    lp.levels[0] = {{0.0, 1.0, true, true}};
    return lp;
  }
  auto f = make_tent(s);
  auto orbit = critical_orbit(f, 1 << p);
  double c1 = orbit[1], c2 = orbit[2];
  lp.levels[-1] = {{c1, 1.0, false, true}};
  lp.levels[0] = {{0.0, c2, true, false}};
  std::vector<Interval> outer = tent_core(orbit, 0);
  for (int k = 1; k < p; ++k) {
    std::vector<Interval> inner = tent_core(orbit, k);
    std::vector<Segment> u;
    for (const auto& a : outer) {
      std::vector<Interval> holes;
      for (const auto& b : inner)
        if (b.hi >= a.lo && b.lo <= a.hi) holes.push_back(b);
      for (const auto& seg : detail::subtract_closed(a, holes)) u.push_back(seg);
    }
    lp.levels[k] = std::move(u);
    outer = std::move(inner);
  }
  std::vector<Segment> attractor;
  for (const auto& a : outer) attractor.push_back({a.lo, a.hi, true, true});
  lp.levels[p] = std::move(attractor);
  return lp;
}

/// Level of x: -1 right of c1, 0 left of c2, otherwise the largest k <= p with
/// x in K(N_{k-1}) (cores closed).
inline int classify_point(double s, double x) {
  int p = checked_depth_for_materialization(s);
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::out_of_domain, "x must lie in [0, 1]");
  if (p == 0) return 0;
  auto f = make_tent(s);
  auto orbit = critical_orbit(f, 1 << p);
  if (x > orbit[1]) return -1;
  if (x < orbit[2]) return 0;
  for (int k = 1; k < p; ++k) {
    bool inside = false;
    for (const auto& iv : core_from_orbit(orbit, 1 << k))
      if (iv.contains(x)) {
        inside = true;
        break;
      }
    if (!inside) return k;
  }
  return p;
}

struct CantorCover {
  int depth = 0;
  std::vector<Interval> intervals;
};

inline constexpr int kMaxCoverDepth = 24;

/// Over-approximation of the Cantor repellor sitting between K(N_0) = [c2, c1]
/// and a regular trapping region: remove f^{-m}(int J_1) for m = 0..depth.
inline CantorCover cantor_cover(const PiecewiseMap& f, const TrappingRegion& tr, int depth) {
  if (depth < 1) throw Error(Errc::invalid_parameter, "cover depth must be >= 1");
  if (depth > kMaxCoverDepth) throw Error(Errc::invalid_parameter, "cover depth must be <= 24");
  if (f.label().family == Family::tent)
    throw Error(Errc::no_cantor_repellor, "tent maps have no Cantor repelling nodes");
  if (tr.intervals.empty() || tr.period < 2)
    throw Error(Errc::no_cantor_repellor, "region of period 1 bounds no Cantor repellor");
  if (tr.flip) throw Error(Errc::flip_region, "Cantor covers are computed for regular regions only");

  double c1 = f.peak();
  double c2 = f.eval(c1);
  std::vector<Interval> holes{tr.intervals.front()};
  std::vector<Interval> layer = holes;
  for (int m = 1; m <= depth; ++m) {
    std::vector<Interval> next;
    for (const auto& iv : layer)
      for (const auto& pre : interval_preimage(f, iv))
        if (pre.length() > 0.0) next.push_back(pre);
    layer = merge_intervals(std::move(next));
    holes.insert(holes.end(), layer.begin(), layer.end());
  }
  holes = merge_intervals(std::move(holes));
  CantorCover cc;
  cc.depth = depth;
  cc.intervals = subtract_open({{c2, c1}}, holes);
  return cc;
}

enum class AttractorType { A2, A5 };

inline const char* attractor_type_name(AttractorType t) { return t == AttractorType::A2 ? "A2" : "A5"; }

/// A5 iff the attractor, read as a trapping region, is cyclic and its periodic
/// J_1 endpoint lies on a Cantor repellor.
inline AttractorType classify_attractor(const PiecewiseMap& f, const std::vector<Node>& nodes) {
  if (nodes.empty() || !nodes.back().is_attractor()) return AttractorType::A2;
  const Node& att = nodes.back();
  std::optional<Interval> j1;
  for (const auto& iv : att.support)
    if (iv.contains(f.critical())) j1 = iv;
  if (!j1) return AttractorType::A2;
  TrappingRegion tr;
  tr.intervals = {*j1};
  for (const auto& iv : att.support)
    if (!(iv == *j1)) tr.intervals.push_back(iv);
  tr.period = static_cast<int>(att.support.size());
  if (!is_cyclic(f, tr)) return AttractorType::A2;

  for (double e : {j1->lo, j1->hi}) {
    double x = e;
    bool periodic = false;
    for (int k = 1; k <= tr.period && !periodic; ++k) {
      x = f.eval(x);
      periodic = std::abs(x - e) <= kRegionTol;
    }
    if (!periodic) continue;
    for (const auto& n : nodes)
      if (n.kind == NodeKind::cantor_repellor && distance(e, n.support) <= kRegionTol) return AttractorType::A5;
  }
  return AttractorType::A2;
}

// ---- u_mu family ----

/// Boundary data of the period-3 trapping region of u_mu:
/// J_1 = [q1, p1], J_2 = [p2, q2], J_3 = [q3, p3].
struct TuRegion {
  Cycle gamma;
  double p1, p2, p3;
  double q1, q2, q3;
};

/// The regular period-3 cycle of u_mu whose point nearest c lies right of c.
inline TuRegion tu_region(const PiecewiseMap& u) {
  const double c = u.critical();
  auto g = [&u](double x) { return u.eval_n(x, 3) - x; };
  const int samples = 4000;
  const double lo = c, hi = c + 0.25;
  std::optional<TuRegion> best;
  for (int i = 0; i < samples; ++i) {
    double a = lo + (hi - lo) * i / samples;
    double b = lo + (hi - lo) * (i + 1) / samples;
    auto root = bisect(g, a, b, 1e-15);
    if (!root || *root <= c) continue;
    double x = *root;
    if (std::abs(u.eval(x) - x) < 1e-6) continue;
    double mult = 1.0;
    double y = x;
    for (int k = 0; k < 3; ++k) {
      mult *= u.derivative(y);
      y = u.eval(y);
    }
    if (!(mult > 0.0)) continue;
    if (best && best->p1 <= x) continue;
    TuRegion t{};
    t.p1 = x;
    t.p2 = u.eval(x);
    t.p3 = u.eval(t.p2);
    t.gamma = make_cycle(u, x, 3);
    best = t;
  }
  if (!best) throw Error(Errc::bracket_failed, "no regular period-3 cycle right of c");
  TuRegion t = *best;
  t.q1 = conjugate(u, t.p1);
  auto q3 = u.invert_on_side(t.q1, Side::left);
  if (!q3) throw Error(Errc::bracket_failed, "q3 not found");
  t.q3 = *q3;
  auto q2 = u.invert_on_side(t.q3, Side::right);
  if (!q2) throw Error(Errc::bracket_failed, "q2 not found");
  t.q2 = *q2;
  return t;
}

/// Nodes of u_mu inside its period-3 window: {0}, the Cantor repellor around
/// the regular 3-cycle, and the attracting cycle of three intervals.
inline std::vector<Node> tu_nodes(double mu, int cover_depth = 10) {
  auto u = make_tu(mu);
  auto region = tu_region(u);
  if (u.peak() > region.q2 + kRegionTol)
    throw Error(Errc::invalid_parameter, "u_mu(c) exceeds q2: outside the period-3 window");

  std::vector<Node> nodes;
  nodes.push_back(Node{0, NodeKind::boundary_fixed, {point_interval(0.0)}, make_cycle(u, 0.0, 1)});

  Node cantor{1, NodeKind::cantor_repellor, {}, region.gamma};
  auto tr = trapping_region(u, cantor);
  cantor.support = cantor_cover(u, tr, cover_depth).intervals;
  nodes.push_back(cantor);

  // First return to J_1 is a symmetric tent; its slope decides whether the
  // attractor is the three-interval core or renormalizes further.
  double probe = 0.5 * (region.q1 + u.critical());
  double slope = std::abs(u.derivative(probe) * u.derivative(u.eval(probe)) * u.derivative(u.eval_n(probe, 2)));
  if (slope * slope < 2.0 - kSquareSnap)
    throw Error(Errc::not_renormalizable, "return map in J_1 is renormalizable: deeper tower not supported");
  auto orbit = critical_orbit(u, 6);
  nodes.push_back(
      Node{2, NodeKind::interval_cycle_attractor, sorted_by_position(core_from_orbit(orbit, 3)), std::nullopt});
  return nodes;
}

/// mu at which u_mu(c) = q2(mu): the attractor fills the whole period-3 region.
inline double tu_window_right_edge() {
  auto g = [](double mu) {
    auto u = make_tu(mu);
    return u.peak() - tu_region(u).q2;
  };
  auto root = bisect(g, 1.0, 1.01, 1e-15);
  if (!root) throw Error(Errc::bracket_failed, "window edge not bracketed");
  return *root;
}

}  // namespace unimodal
