#pragma once

// Backward orbits: preimage trees, an estimate of the special alpha-limit set
// from the tree, the level-wise prediction, and greedy dense backward orbits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "error.hpp"
#include "interval.hpp"
#include "maps.hpp"
#include "numeric.hpp"
#include "structure.hpp"

namespace unimodal {

inline constexpr int kMaxTreeDepth = 48;
inline constexpr std::size_t kLevelCap = 200000;
inline constexpr double kMergeTol = 1e-12;
inline constexpr double kDefaultClusterTol = 5e-3;
inline constexpr int kDefaultSalphaDepth = 30;

struct BackwardTree {
  double root = 0.0;
  int depth = 0;
  std::vector<std::vector<double>> levels;         // levels[0] = {root}; each level sorted
  std::vector<std::vector<std::int32_t>> parents;  // parents[d][i]: index in levels[d-1]

  std::size_t total_points() const {
    std::size_t t = 0;
    for (const auto& l : levels) t += l.size();
    return t;
  }
};

namespace detail {

struct Tagged {
  double x;
  std::int32_t parent;
};

/// Keeps every cluster's extreme points and a uniform subsample in between.
inline std::vector<Tagged> thin_level(const std::vector<Tagged>& pts, std::size_t cap, double gap) {
  if (pts.size() <= cap) return pts;
  std::size_t stride = (pts.size() + cap - 1) / cap;
  std::vector<Tagged> out;
  out.reserve(cap + cap / 4);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool first = i == 0 || pts[i].x - pts[i - 1].x > gap;
    bool last = i + 1 == pts.size() || pts[i + 1].x - pts[i].x > gap;
    if (first || last || i % stride == 0) out.push_back(pts[i]);
  }
  return out;
}

}  // namespace detail

/// Breadth-first preimages of x. Points within 1e-12 are merged; levels above
/// 2e5 points are thinned. `filter` drops preimages outside the interval.
inline BackwardTree preimage_tree(const PiecewiseMap& f, double x, int depth,
                                  std::optional<Interval> filter = std::nullopt) {
  if (depth < 0 || depth > kMaxTreeDepth) throw Error(Errc::invalid_parameter, "tree depth must lie in [0, 48]");
  if (!f.domain().contains(x)) throw Error(Errc::out_of_domain, "root outside the domain");
  BackwardTree t;
  t.root = x;
  t.depth = depth;
  t.levels.push_back({x});
  t.parents.push_back({-1});
  for (int d = 1; d <= depth; ++d) {
    const auto& prev = t.levels.back();
    std::vector<detail::Tagged> slots(prev.size() * 2, {std::numeric_limits<double>::quiet_NaN(), -1});
    parallel_for(prev.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        auto pre = preimages(f, prev[i]);
        std::size_t k = 0;
        for (double z : pre) {
          if (filter && !filter->contains(z)) continue;
          if (k < 2) slots[2 * i + k++] = {z, static_cast<std::int32_t>(i)};
        }
      }
    });
    std::vector<detail::Tagged> next;
    for (const auto& s : slots)
      if (!std::isnan(s.x)) next.push_back(s);
    std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    std::vector<detail::Tagged> merged;
    for (const auto& s : next)
      if (merged.empty() || s.x - merged.back().x > kMergeTol) merged.push_back(s);
    // clusters are runs closer than four times the mean spacing at the cap
    if (merged.size() > kLevelCap)
      merged = detail::thin_level(merged, kLevelCap, 4.0 * (merged.back().x - merged.front().x) / kLevelCap);
    std::vector<double> xs;
    std::vector<std::int32_t> ps;
    xs.reserve(merged.size());
    ps.reserve(merged.size());
    for (const auto& s : merged) {
      xs.push_back(s.x);
      ps.push_back(s.parent);
    }
    t.levels.push_back(std::move(xs));
    t.parents.push_back(std::move(ps));
  }
  return t;
}

struct AccumulationSet {
  std::vector<double> points;       // sorted
  std::vector<Interval> intervals;  // points clustered at cluster_tol
  double cluster_tol = kDefaultClusterTol;
  bool degenerate = false;          // tree had fewer than 10 points
};

namespace detail {

/// Limit of the tail w[end], w[end-q], ... when its last four differences
/// shrink by one consistent ratio of modulus < 1 (Aitken extrapolation).
inline std::optional<double> geometric_limit(const std::vector<double>& w, int end, int q) {
  if (end - 4 * q < 0) return std::nullopt;
  double u[5];
  for (int k = 0; k < 5; ++k) u[k] = w[static_cast<std::size_t>(end - (4 - k) * q)];
  double d[4];
  for (int k = 0; k < 4; ++k) d[k] = u[k + 1] - u[k];
  if (d[3] == 0.0) return d[2] == 0.0 ? std::optional<double>(u[4]) : std::nullopt;
  if (d[0] == 0.0 || d[1] == 0.0 || d[2] == 0.0) return std::nullopt;
  double r0 = d[1] / d[0], r1 = d[2] / d[1], r2 = d[3] / d[2];
  double hi = std::max({r0, r1, r2});
  double lo = std::min({r0, r1, r2});
  if (hi - lo > 1e-3 || std::abs(r2) >= 1.0) return std::nullopt;
  return u[4] + d[3] * r2 / (1.0 - r2);
}

inline std::vector<Interval> cluster(const std::vector<double>& sorted, double tol) {
  std::vector<Interval> out;
  for (double x : sorted) {
    if (!out.empty() && x - out.back().hi <= tol) out.back().hi = x;
    else out.push_back({x, x});
  }
  return out;
}

}  // namespace detail

/// Estimate of the special alpha-limit set from backward paths of length depth.
/// Each surviving path is read on its levels depth/2 .. depth: a tail that
/// converges geometrically (a backward orbit falling onto a repelling cycle)
/// contributes its extrapolated limits, any other path contributes the window
/// points it revisits within cluster_tol.
inline AccumulationSet salpha(const PiecewiseMap& f, double x, int depth = kDefaultSalphaDepth,
                              double cluster_tol = kDefaultClusterTol) {
  if (depth < 20) throw Error(Errc::invalid_parameter, "salpha needs depth >= 20");
  if (!(cluster_tol > 0.0)) throw Error(Errc::invalid_parameter, "cluster tolerance must be positive");
  auto tree = preimage_tree(f, x, depth);
  AccumulationSet acc;
  acc.cluster_tol = cluster_tol;
  acc.degenerate = tree.total_points() < 10;
  const auto& leaves = tree.levels.back();
  if (leaves.empty()) return acc;

  const int first = depth / 2;
  const int width = depth - first + 1;
  std::vector<std::vector<double>> found(leaves.size());
  parallel_for(leaves.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> w(static_cast<std::size_t>(width));
    for (std::size_t leaf = b; leaf < e; ++leaf) {
      std::int32_t idx = static_cast<std::int32_t>(leaf);
      for (int d = depth; d >= first; --d) {
        w[static_cast<std::size_t>(d - first)] = tree.levels[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx)];
        idx = tree.parents[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx)];
      }
      auto& out = found[leaf];
      const int end = width - 1;
      bool converged = false;
      for (int q = 1; 4 * q <= end && !converged; q *= 2) {
        auto lim = detail::geometric_limit(w, end, q);
        if (!lim) continue;
        converged = true;
        out.push_back(*lim);
        for (int phase = 1; phase < q; ++phase)
          if (auto other = detail::geometric_limit(w, end - phase, q)) out.push_back(*other);
      }
      if (converged) continue;
      // A point counts once the path leaves its cluster_tol-neighbourhood and
      // comes back; slow monotone transients never do.
      std::vector<char> mark(static_cast<std::size_t>(width), 0);
      for (int a = 0; a < width; ++a) {
        bool away = false;
        for (int b = a + 1; b < width; ++b) {
          double dist = std::abs(w[static_cast<std::size_t>(b)] - w[static_cast<std::size_t>(a)]);
          if (dist > cluster_tol) away = true;
          else if (away) mark[static_cast<std::size_t>(a)] = mark[static_cast<std::size_t>(b)] = 1;
        }
      }
      for (int a = 0; a < width; ++a)
        if (mark[static_cast<std::size_t>(a)]) out.push_back(w[static_cast<std::size_t>(a)]);
    }
  });
  for (auto& v : found) acc.points.insert(acc.points.end(), v.begin(), v.end());
  std::sort(acc.points.begin(), acc.points.end());
  acc.points.erase(std::unique(acc.points.begin(), acc.points.end(),
                               [](double a, double b) { return b - a <= kMergeTol; }),
                   acc.points.end());
  acc.intervals = detail::cluster(acc.points, cluster_tol);
  return acc;
}

struct PredictedSalpha {
  int level = 0;
  std::vector<Interval> set;  // union of node supports N_0..N_level
  bool in_scope = true;       // false for level -1, where no prediction is made
};

inline PredictedSalpha predicted_salpha(double s, double x) {
  PredictedSalpha p;
  p.level = classify_point(s, x);
  if (p.level < 0) {
    p.in_scope = false;
    return p;
  }
  auto nodes = analytic_nodes(s);
  for (int k = 0; k <= p.level && k < static_cast<int>(nodes.size()); ++k)
    for (const auto& iv : nodes[static_cast<std::size_t>(k)].support) p.set.push_back(iv);
  p.set = merge_intervals(std::move(p.set));
  return p;
}

struct SalphaReport {
  double s = 0.0;
  double x = 0.0;
  int level = 0;
  std::vector<Interval> predicted;
  std::vector<Interval> estimated;
  double hausdorff = 0.0;
  bool pass = false;
  bool in_scope = true;
  bool degenerate = false;
};

inline SalphaReport compare_salpha(const PiecewiseMap& f, double x, int depth, double tol,
                                   double cluster_tol = kDefaultClusterTol) {
  if (f.label().family != Family::tent) throw Error(Errc::invalid_parameter, "sα prediction covers tent maps");
  SalphaReport r;
  r.s = f.label().parameter;
  r.x = x;
  auto pred = predicted_salpha(r.s, x);
  auto est = salpha(f, x, depth, cluster_tol);
  r.level = pred.level;
  r.in_scope = pred.in_scope;
  r.predicted = pred.set;
  r.estimated = est.intervals;
  r.degenerate = est.degenerate;
  r.hausdorff = hausdorff(r.predicted, r.estimated);
  r.pass = r.hausdorff <= tol;
  return r;
}

struct DenseOrbit {
  std::vector<double> points;  // x_0, x_{-1}, x_{-2}, ...
  std::vector<Interval> attractor;
  double delta = 0.0;
  std::size_t net_size = 0;
  double max_gap = 0.0;        // sup over the net of the distance to the orbit
  double max_step_error = 0.0; // max |f(x_{-i-1}) - x_{-i}|
};

/// Greedy backward orbit through the attractor of T_s that comes within delta
/// of every point of the attractor. Each step picks the preimage whose
/// depth-8 preimage cone hits the most uncovered cells of a delta/2 net.
inline DenseOrbit dense_backward_orbit(const PiecewiseMap& f, double x, double delta,
                                       std::size_t max_steps = 1000000) {
  if (f.label().family != Family::tent) throw Error(Errc::invalid_parameter, "dense orbits are built for tent maps");
  if (!(delta >= 1e-3)) throw Error(Errc::invalid_parameter, "delta must be >= 1e-3");
  auto nodes = analytic_nodes(f.label().parameter);
  DenseOrbit out;
  out.delta = delta;
  out.attractor = nodes.back().support;
  const auto& att = out.attractor;
  if (distance(x, att) > 1e-12) throw Error(Errc::invalid_parameter, "x must lie in the attractor");

  const double cell = delta / 2.0;
  std::vector<double> net;
  for (const auto& iv : att) {
    int k = std::max(1, static_cast<int>(std::ceil(iv.length() / cell)));
    for (int i = 0; i < k; ++i) net.push_back(iv.lo + (i + 0.5) * iv.length() / k);
  }
  std::sort(net.begin(), net.end());
  out.net_size = net.size();
  std::set<std::size_t> uncovered;
  for (std::size_t i = 0; i < net.size(); ++i) uncovered.insert(i);

  auto cover = [&](double z) {
    auto lo = std::lower_bound(net.begin(), net.end(), z - cell);
    auto hi = std::upper_bound(net.begin(), net.end(), z + cell);
    for (auto it = lo; it != hi; ++it) uncovered.erase(static_cast<std::size_t>(it - net.begin()));
  };
  auto in_attractor = [&](double z) { return distance(z, att) <= 1e-12; };
  auto nearest_net = [&](double z) {
    auto it = std::lower_bound(net.begin(), net.end(), z);
    std::size_t i = static_cast<std::size_t>(it - net.begin());
    if (i == net.size() || (i > 0 && z - net[i - 1] < net[i] - z)) --i;
    return i;
  };
  auto gap_to_uncovered = [&](double z) {
    double best = std::numeric_limits<double>::infinity();
    auto it = uncovered.lower_bound(nearest_net(z));
    if (it != uncovered.end()) best = std::abs(net[*it] - z);
    if (it != uncovered.begin()) best = std::min(best, std::abs(net[*std::prev(it)] - z));
    return best;
  };

  out.points.push_back(x);
  cover(x);
  std::vector<double> frontier, next;
  while (!uncovered.empty()) {
    if (out.points.size() > max_steps)
      throw Error(Errc::coverage_failed, "attractor not covered within the step limit");
    double y = out.points.back();
    // Rank candidates by the shallowest lookahead level reaching an uncovered
    // cell, then by the number of uncovered cells in the cone, then by distance.
    std::optional<double> best;
    int best_depth = std::numeric_limits<int>::max();
    std::size_t best_score = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double z : preimages(f, y)) {
      if (!in_attractor(z)) continue;
      std::set<std::size_t> hit;
      int first_hit = std::numeric_limits<int>::max();
      frontier.assign(1, z);
      for (int d = 0; d < 8; ++d) {
        next.clear();
        for (double w : frontier) {
          std::size_t ni = nearest_net(w);
          if (uncovered.count(ni)) {
            hit.insert(ni);
            first_hit = std::min(first_hit, d);
          }
          for (double v : preimages(f, w))
            if (in_attractor(v)) next.push_back(v);
        }
        frontier.swap(next);
      }
      double g = gap_to_uncovered(z);
      bool better = !best || first_hit < best_depth ||
                    (first_hit == best_depth && (hit.size() > best_score || (hit.size() == best_score && g < best_gap)));
      if (better) {
        best = z;
        best_depth = first_hit;
        best_score = hit.size();
        best_gap = g;
      }
    }
    if (!best) throw Error(Errc::coverage_failed, "no preimage inside the attractor");
    std::vector<double> path{*best};
    if (best_score == 0) {
      // Nothing uncovered within the lookahead: walk the preimage tree level by
      // level (one representative per net cell) to the nearest uncovered cell.
      struct Visit {
        double x;
        std::int32_t parent;
      };
      std::vector<std::vector<Visit>> bfs{{{y, -1}}};
      std::optional<std::pair<std::size_t, std::size_t>> target;
      for (int d = 1; d <= 64 && !target; ++d) {
        std::vector<Visit> lvl;
        std::set<std::size_t> seen;
        const auto& prev = bfs.back();
        for (std::size_t i = 0; i < prev.size() && !target; ++i) {
          for (double v : preimages(f, prev[i].x)) {
            if (!in_attractor(v)) continue;
            std::size_t ni = nearest_net(v);
            if (!seen.insert(ni).second) continue;
            lvl.push_back({v, static_cast<std::int32_t>(i)});
            if (uncovered.count(ni)) {
              target = {static_cast<std::size_t>(d), lvl.size() - 1};
              break;
            }
          }
        }
        if (lvl.empty()) break;
        bfs.push_back(std::move(lvl));
      }
      if (target) {
        path.clear();
        std::size_t idx = target->second;
        for (std::size_t d = target->first; d >= 1; --d) {
          path.push_back(bfs[d][idx].x);
          idx = static_cast<std::size_t>(bfs[d][idx].parent);
        }
        std::reverse(path.begin(), path.end());
      }
    }
    for (double z : path) {
      double prev = out.points.back();
      double err = std::abs(f.eval(z) - prev);
      out.max_step_error = std::max(out.max_step_error, err);
      if (err > 1e-9) throw Error(Errc::coverage_failed, "backward step does not map forward onto its successor");
      out.points.push_back(z);
      cover(z);
    }
  }

  std::vector<double> sorted = out.points;
  std::sort(sorted.begin(), sorted.end());
  for (double p : net) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), p);
    double d = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) d = *it - p;
    if (it != sorted.begin()) d = std::min(d, p - *std::prev(it));
    out.max_gap = std::max(out.max_gap, d);
  }
  return out;
}

}  // namespace unimodal
