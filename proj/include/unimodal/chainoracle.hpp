#pragma once

// Brute-force chain recurrence on a uniform grid: an eps-chain of the map is
// modelled by the graph i -> j iff |f(x_i) - x_j| <= eps over cell centres x_i.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "interval.hpp"
#include "maps.hpp"
#include "numeric.hpp"
#include "structure.hpp"

namespace unimodal {

struct GridGraph {
  int n = 0;
  double a = 0.0;
  double h = 0.0;
  double epsilon = 0.0;
  // Successors of cell i are the cells lo[i]..hi[i] (empty when lo > hi).
  std::vector<std::int32_t> lo, hi;

  double center(int i) const { return a + (i + 0.5) * h; }
  int cell_of(double x) const {
    int i = static_cast<int>(std::floor((x - a) / h));
    return std::clamp(i, 0, n - 1);
  }
  bool has_edge(int i, int j) const { return j >= lo[i] && j <= hi[i]; }
  bool self_loop(int i) const { return has_edge(i, i); }
};

/// Successor ranges in O(n). No true orbit is lost once
/// eps >= (L + 1) h / 2, L the Lipschitz constant of f.
inline GridGraph build_transition_graph(const PiecewiseMap& f, int n, double epsilon) {
  if (n < 100) throw Error(Errc::invalid_parameter, "grid needs at least 100 cells");
  const Interval d = f.domain();
  GridGraph g;
  g.n = n;
  g.a = d.lo;
  g.h = d.length() / n;
  g.epsilon = epsilon;
  if (!(epsilon >= 0.5 * g.h)) throw Error(Errc::invalid_parameter, "epsilon below h/2 under-approximates the dynamics");
  g.lo.resize(static_cast<std::size_t>(n));
  g.hi.resize(static_cast<std::size_t>(n));
  const double slack = 1e-9 * g.h;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double y = f.eval(g.center(static_cast<int>(i)));
      double jl = std::ceil((y - epsilon - slack - g.a) / g.h - 0.5);
      double jh = std::floor((y + epsilon + slack - g.a) / g.h - 0.5);
      g.lo[i] = static_cast<std::int32_t>(std::max(0.0, jl));
      g.hi[i] = static_cast<std::int32_t>(std::min<double>(n - 1, jh));
    }
  });
  return g;
}

struct SccResult {
  std::vector<std::int32_t> comp;  // component id per cell; ids follow Tarjan completion (sinks first)
  int count = 0;
  std::vector<std::int32_t> size;
};

/// Iterative Tarjan over the range adjacency.
inline SccResult strongly_connected(const GridGraph& g) {
  const int n = g.n;
  std::vector<std::int32_t> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> stack;
  SccResult res;
  res.comp.assign(static_cast<std::size_t>(n), -1);
  struct Frame {
    std::int32_t v;
    std::int32_t next;
  };
  std::vector<Frame> frames;
  std::int32_t counter = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    frames.push_back({root, g.lo[root]});
    while (!frames.empty()) {
      Frame& fr = frames.back();
      const std::int32_t v = fr.v;
      if (fr.next <= g.hi[v]) {
        std::int32_t w = fr.next++;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, g.lo[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::int32_t sz = 0;
        std::int32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          res.comp[w] = res.count;
          ++sz;
        } while (w != v);
        res.size.push_back(sz);
        ++res.count;
      }
      frames.pop_back();
      if (!frames.empty()) {
        std::int32_t parent = frames.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return res;
}

/// A cell is recurrent when its component carries an edge: size > 1 or a self-loop.
inline std::vector<char> recurrent_cells(const GridGraph& g, const SccResult& scc) {
  std::vector<char> rec(static_cast<std::size_t>(g.n), 0);
  for (int i = 0; i < g.n; ++i) rec[i] = scc.size[scc.comp[i]] > 1 || g.self_loop(i);
  return rec;
}

struct ChainClasses {
  std::vector<double> epsilons;                // decreasing
  int n = 0;
  double a = 0.0;
  double h = 0.0;
  std::vector<std::vector<std::int32_t>> classes;  // sorted cell indices, ordered by max f over the class
  std::vector<std::vector<char>> recurrent_per_eps;
  std::vector<char> recurrent;                 // intersection over all eps
  GridGraph finest;                            // graph at the smallest eps
  SccResult finest_scc;

  double center(int i) const { return a + (i + 0.5) * h; }

  /// Maximal runs of consecutive cells of a class.
  std::vector<std::pair<int, int>> runs(std::size_t k) const {
    std::vector<std::pair<int, int>> out;
    for (auto c : classes[k]) {
      if (!out.empty() && out.back().second + 1 == c) out.back().second = c;
      else out.push_back({c, c});
    }
    return out;
  }

  /// Support of a class as intervals between first and last cell centres of each run.
  std::vector<Interval> support(std::size_t k) const {
    std::vector<Interval> out;
    for (auto [b, e] : runs(k)) out.push_back({center(b), center(e)});
    return out;
  }
};

inline std::vector<double> default_epsilons(double h) { return {32.0 * h, 8.0 * h, 2.0 * h}; }

inline ChainClasses chain_recurrent_cells(const PiecewiseMap& f, int n, std::vector<double> epsilons) {
  if (epsilons.empty()) throw Error(Errc::invalid_parameter, "epsilon list is empty");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1])) throw Error(Errc::invalid_parameter, "epsilon list must be strictly decreasing");

  ChainClasses out;
  out.epsilons = epsilons;
  out.n = n;
  out.a = f.domain().lo;
  out.h = f.domain().length() / n;
  if (epsilons.back() < out.h * (1.0 - 1e-12)) throw Error(Errc::invalid_parameter, "smallest epsilon must be >= h");
  out.recurrent.assign(static_cast<std::size_t>(n), 1);

  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    auto g = build_transition_graph(f, n, epsilons[e]);
    auto scc = strongly_connected(g);
    auto rec = recurrent_cells(g, scc);
    for (int i = 0; i < n; ++i) out.recurrent[i] = out.recurrent[i] && rec[i];
    out.recurrent_per_eps.push_back(std::move(rec));
    if (e + 1 == epsilons.size()) {
      out.finest = std::move(g);
      out.finest_scc = std::move(scc);
    }
  }

  // Cells next to a repelling cycle are eps-recurrent through a self-loop yet
  // cannot chain back onto the cycle, so one node shows up as several grid-scale
  // components. Components whose recurrent cells come within ceil(eps/h) cells
  // of each other are merged into one class.
  const int gap = std::max(1, static_cast<int>(std::ceil(epsilons.back() / out.h - 1e-9)));
  std::vector<std::int32_t> parent(static_cast<std::size_t>(out.finest_scc.count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (!out.recurrent[i]) continue;
    if (last >= 0 && i - last <= gap) {
      auto ra = find(out.finest_scc.comp[last]);
      auto rb = find(out.finest_scc.comp[i]);
      if (ra != rb) parent[rb] = ra;
    }
    last = i;
  }

  std::vector<std::int32_t> slot(static_cast<std::size_t>(out.finest_scc.count), -1);
  for (int i = 0; i < n; ++i) {
    if (!out.recurrent[i]) continue;
    auto c = find(out.finest_scc.comp[i]);
    if (slot[c] < 0) {
      slot[c] = static_cast<std::int32_t>(out.classes.size());
      out.classes.emplace_back();
    }
    out.classes[slot[c]].push_back(i);
  }
  std::vector<double> key;
  for (const auto& cls : out.classes) {
    double m = -std::numeric_limits<double>::infinity();
    for (auto i : cls) m = std::max(m, f.eval(out.center(i)));
    key.push_back(m);
  }
  std::vector<std::size_t> order(out.classes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return key[x] < key[y]; });
  std::vector<std::vector<std::int32_t>> sorted;
  for (auto k : order) sorted.push_back(std::move(out.classes[k]));
  out.classes = std::move(sorted);
  return out;
}

struct ConleyGraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;

  bool has_edge(int i, int j) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(i, j)) != edges.end();
  }
};

/// Edge i -> j when a cell within two cells of class i, outside it, reaches
/// class j in the finest graph.
inline ConleyGraph conley_graph(const ChainClasses& cc) {
  const int m = static_cast<int>(cc.classes.size());
  ConleyGraph cg;
  cg.nodes = m;
  if (m == 0) return cg;
  const auto& g = cc.finest;
  const auto& scc = cc.finest_scc;
  const int words = (m + 63) / 64;
  std::vector<std::uint64_t> reach(static_cast<std::size_t>(scc.count) * words, 0);
  auto mask = [&](int comp) { return reach.data() + static_cast<std::size_t>(comp) * words; };

  std::vector<std::int32_t> owner(static_cast<std::size_t>(g.n), -1);
  for (int k = 0; k < m; ++k)
    for (auto i : cc.classes[k]) owner[i] = k;

  // Tarjan ids are a reverse topological order: successors of a component
  // carry smaller or equal ids, so one pass in id order settles all masks.
  std::vector<std::int32_t> by_comp(static_cast<std::size_t>(g.n));
  std::iota(by_comp.begin(), by_comp.end(), 0);
  std::stable_sort(by_comp.begin(), by_comp.end(), [&](auto x, auto y) { return scc.comp[x] < scc.comp[y]; });
  for (auto v : by_comp) {
    auto* mv = mask(scc.comp[v]);
    if (owner[v] >= 0) mv[owner[v] / 64] |= std::uint64_t{1} << (owner[v] % 64);
    for (int w = g.lo[v]; w <= g.hi[v]; ++w) {
      if (scc.comp[w] == scc.comp[v]) continue;
      const auto* mw = mask(scc.comp[w]);
      for (int t = 0; t < words; ++t) mv[t] |= mw[t];
    }
  }

  for (int i = 0; i < m; ++i) {
    std::vector<std::uint64_t> acc(static_cast<std::size_t>(words), 0);
    for (auto cell : cc.classes[i]) {
      for (int d = -2; d <= 2; ++d) {
        int u = cell + d;
        if (u < 0 || u >= g.n || owner[u] == i) continue;
        const auto* mu = mask(scc.comp[u]);
        for (int t = 0; t < words; ++t) acc[t] |= mu[t];
      }
    }
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      if (acc[j / 64] >> (j % 64) & 1u) cg.edges.push_back({i, j});
    }
  }
  return cg;
}

/// Throws on a cycle; true iff every pair of distinct nodes is joined by an edge.
inline bool verify_tower(const ConleyGraph& cg) {
  const int m = cg.nodes;
  std::vector<int> indeg(static_cast<std::size_t>(m), 0);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  for (auto [i, j] : cg.edges) {
    if (i < 0 || j < 0 || i >= m || j >= m) throw Error(Errc::invalid_parameter, "edge endpoint out of range");
    adj[i].push_back(j);
    ++indeg[j];
  }
  std::vector<int> queue;
  for (int i = 0; i < m; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  std::size_t seen = 0;
  while (seen < queue.size()) {
    int v = queue[seen++];
    for (int w : adj[v])
      if (--indeg[w] == 0) queue.push_back(w);
  }
  if (static_cast<int>(seen) != m) throw Error(Errc::cyclic_graph, "Conley graph has a cycle");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (!cg.has_edge(i, j) && !cg.has_edge(j, i)) return false;
  return true;
}

struct MatchReport {
  int analytic_count = 0;
  int oracle_count = 0;
  bool count_ok = false;
  std::vector<std::pair<int, int>> pairs;  // (analytic index, oracle class)
  std::vector<double> hausdorff;
  double max_hausdorff = std::numeric_limits<double>::infinity();
  bool pass = false;
};

namespace detail {

inline bool kuhn_augment(int u, double thr, const std::vector<std::vector<double>>& d, std::vector<int>& match_r,
                         std::vector<char>& seen) {
  for (std::size_t v = 0; v < d[u].size(); ++v) {
    if (d[u][v] > thr || seen[v]) continue;
    seen[v] = 1;
    if (match_r[v] < 0 || kuhn_augment(match_r[v], thr, d, match_r, seen)) {
      match_r[v] = u;
      return true;
    }
  }
  return false;
}

inline std::optional<std::vector<int>> perfect_matching(const std::vector<std::vector<double>>& d, double thr) {
  const std::size_t m = d.size();
  std::vector<int> match_r(m, -1);
  for (std::size_t u = 0; u < m; ++u) {
    std::vector<char> seen(m, 0);
    if (!kuhn_augment(static_cast<int>(u), thr, d, match_r, seen)) return std::nullopt;
  }
  return match_r;
}

}  // namespace detail

/// One-to-one pairing of analytic nodes with oracle classes minimising the
/// largest Hausdorff distance (bottleneck assignment).
inline MatchReport match_nodes(const std::vector<Node>& analytic, const ChainClasses& oracle, double tol) {
  MatchReport rep;
  rep.analytic_count = static_cast<int>(analytic.size());
  rep.oracle_count = static_cast<int>(oracle.classes.size());
  rep.count_ok = rep.analytic_count == rep.oracle_count;
  if (!rep.count_ok || analytic.empty()) {
    rep.pass = rep.count_ok;
    if (rep.pass) rep.max_hausdorff = 0.0;
    return rep;
  }
  const std::size_t m = analytic.size();
  std::vector<std::vector<double>> d(m, std::vector<double>(m));
  std::vector<double> values;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      auto sup = oracle.support(j);
      d[i][j] = hausdorff(analytic[i].support, sup);
      values.push_back(d[i][j]);
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::size_t lo = 0, hi = values.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (detail::perfect_matching(d, values[mid])) hi = mid;
    else lo = mid + 1;
  }
  auto match_r = *detail::perfect_matching(d, values[lo]);
  std::vector<int> of_analytic(m);
  for (std::size_t v = 0; v < m; ++v) of_analytic[match_r[v]] = static_cast<int>(v);
  rep.max_hausdorff = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    int j = of_analytic[i];
    rep.pairs.push_back({static_cast<int>(i), j});
    rep.hausdorff.push_back(d[i][j]);
    rep.max_hausdorff = std::max(rep.max_hausdorff, d[i][j]);
  }
  rep.pass = rep.max_hausdorff <= tol;
  return rep;
}

/// Smallest n with f^n(J) ⊇ [c2, c1], using exact interval images, within
/// the bound ceil(2 log(|core| / |J|) / log s^2) + 4.
inline int expansion_time(const PiecewiseMap& f, Interval j) {
  if (f.label().family != Family::tent) throw Error(Errc::invalid_parameter, "expansion time is defined for tent maps");
  double s = f.label().parameter;
  if (s <= 1.0) throw Error(Errc::invalid_parameter, "tent parameter must exceed 1");
  double c1 = f.peak();
  double c2 = f.eval(c1);
  Interval core{c2, c1};
  if (!(j.length() > 0.0)) throw Error(Errc::invalid_parameter, "interval must have positive length");
  if (!core.contains(j, 1e-12)) throw Error(Errc::invalid_parameter, "interval must lie in the core");
  int bound = static_cast<int>(std::ceil(2.0 * std::log(core.length() / j.length()) / std::log(s * s))) + 4;
  Interval img = j;
  for (int n = 0; n <= bound; ++n) {
    if (img.lo <= c2 + 1e-12 && img.hi >= c1 - 1e-12) return n;
    img = f.image(img);
  }
  throw Error(Errc::timeout, "interval did not cover the core within the step bound");
}

}  // namespace unimodal
