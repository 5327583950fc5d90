// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "unimodal/unimodal.hpp"

using namespace unimodal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream why;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) why << "; ";
      why << what;
      pass = false;
    }
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

ChainClasses oracle(double s, int n) { return chain_recurrent_cells(make_tent(s), n, default_epsilons(1.0 / n)); }

void node_recovery_18(Outcome& o) {
  auto t0 = Clock::now();
  auto nodes = analytic_nodes(1.8);
  o.require(nodes.size() == 2, "expected two nodes");
  if (nodes.size() != 2) return;
  o.require(nodes[0].support == std::vector<Interval>{{0.0, 0.0}}, "N0 is not {0}");
  o.require(nodes[1].support.size() == 1 && near(nodes[1].support[0].lo, 0.18, 1e-15) &&
                near(nodes[1].support[0].hi, 0.9, 1e-15),
            "N1 is not [0.18, 0.9]");
  const int n = 100000;
  auto cc = oracle(1.8, n);
  auto m = match_nodes(nodes, cc, 4.0 / n);
  o.require(m.pass, "oracle match " + std::to_string(m.max_hausdorff * n) + "h > 4h");
  double t = seconds_since(t0);
  o.require(t < 5.0, "took " + std::to_string(t) + " s");
  o.why << (o.pass ? "" : " | ") << "max Hausdorff " << m.max_hausdorff * n << "h, " << t << " s";
}

void node_recovery_14(Outcome& o) {
  o.require(node_depth(1.4) == 2, "p != 2");
  auto nodes = analytic_nodes(1.4);
  o.require(nodes.size() == 3, "expected three nodes");
  if (nodes.size() != 3) return;
  o.require(nodes[1].support.size() == 1 && near(nodes[1].support[0].lo, 7.0 / 12.0, 1e-9), "N1 is not {7/12}");
  const std::vector<Interval> att{{0.42, 0.5768}, {0.588, 0.7}};
  bool ok = nodes[2].support.size() == 2;
  for (std::size_t i = 0; ok && i < 2; ++i)
    ok = near(nodes[2].support[i].lo, att[i].lo, 1e-9) && near(nodes[2].support[i].hi, att[i].hi, 1e-9);
  o.require(ok, "attractor is not [0.42, 0.5768] u [0.588, 0.7]");
  const int n = 100000;
  auto cc = oracle(1.4, n);
  auto m = match_nodes(nodes, cc, 4.0 / n);
  std::ostringstream d;
  d << "oracle match: " << m.oracle_count << " classes";
  if (m.count_ok) {
    d << ", Hausdorff";
    for (double h : m.hausdorff) d << ' ' << h * n << 'h';
  }
  d << " (tolerance 4h)";
  o.require(m.pass, d.str());
}

void depth_table(Outcome& o) {
  struct Row {
    double s;
    int p;
  };
  for (auto r : {Row{2.0, 0}, Row{1.9, 1}, Row{1.4142136, 1}, Row{1.3, 2}, Row{1.2, 2}, Row{1.1, 3},
                 Row{std::pow(2.0, 1.0 / 8.0), 3}}) {
    int got = node_depth(r.s);
    o.require(got == r.p, "node_depth(" + std::to_string(r.s) + ") = " + std::to_string(got));
  }
}

void full_tent(Outcome& o) {
  const int n = 100000;
  const double h = 1.0 / n;
  auto cc = oracle(2.0, n);
  o.require(cc.classes.size() == 1, std::to_string(cc.classes.size()) + " classes");
  if (cc.classes.size() != 1) return;
  std::vector<Interval> whole{{0.0, 1.0}};
  double d = hausdorff(cc.support(0), whole);
  o.require(d <= 2.0 * h, "support is " + std::to_string(d / h) + "h from [0, 1]");
}

void tower_grid(Outcome& o) {
  auto t0 = Clock::now();
  const int n = 100000;
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    double s = 1.01 + 0.99 * (i + 0.5) / 50.0;
    auto cg = conley_graph(oracle(s, n));
    bool ok = false;
    try {
      ok = verify_tower(cg);
    } catch (const Error&) {
    }
    if (!ok) {
      ++bad;
      o.require(false, "no tower at s = " + std::to_string(s));
    }
  }
  double t = seconds_since(t0);
  o.require(t < 180.0, "took " + std::to_string(t) + " s");
  if (o.pass) o.why << "50/50 towers, " << t << " s";
}

void negative_control(Outcome& o) {
  const int n = 100000;
  const double h = 1.0 / n;
  auto cc = oracle(1.8, n);
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    if (!cc.recurrent[static_cast<std::size_t>(i)]) continue;
    double lo = i * h, hi = (i + 1) * h;
    if (lo > 2.0 * h && hi < 0.18 - 2.0 * h) ++hits;
  }
  o.require(hits == 0, std::to_string(hits) + " recurrent cells in the gap");
}

void salpha_suite(Outcome& o) {
  struct Case {
    double s, x;
    int depth, level;
  };
  for (auto c : {Case{1.6, 0.2, 30, 0}, Case{1.6, 0.5, 30, 1}, Case{1.2, 0.5455, 34, 1}, Case{1.4, 0.65, 34, 2}}) {
    auto t0 = Clock::now();
    auto r = compare_salpha(make_tent(c.s), c.x, c.depth, 0.02);
    double t = seconds_since(t0);
    std::ostringstream tag;
    tag << "(" << c.s << ", " << c.x << ")";
    o.require(r.level == c.level, tag.str() + " level " + std::to_string(r.level));
    o.require(r.pass, tag.str() + " Hausdorff " + std::to_string(r.hausdorff));
    o.require(t < 30.0, tag.str() + " took " + std::to_string(t) + " s");
  }
}

void dense_orbits(Outcome& o) {
  struct Case {
    double s, x;
  };
  const double delta = 0.01;
  for (auto c : {Case{2.0, 0.3}, Case{1.8, 0.5}, Case{1.5, 0.5}}) {
    std::string tag = "s = " + std::to_string(c.s);
    auto f = make_tent(c.s);
    DenseOrbit d;
    try {
      d = dense_backward_orbit(f, c.x, delta);
    } catch (const Error& e) {
      o.require(false, tag + ": " + e.what());
      continue;
    }
    o.require(d.points.size() >= 1 && d.points.size() - 1 <= 100000, tag + ": too many steps");
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < d.points.size(); ++i)
      worst = std::max(worst, std::abs(f.eval(d.points[i + 1]) - d.points[i]));
    o.require(worst <= 1e-9, tag + ": step error " + std::to_string(worst));
    // coverage on a grid of the analytic attractor, independent of the orbit's own net
    std::vector<double> sorted = d.points;
    std::sort(sorted.begin(), sorted.end());
    double gap = 0.0;
    const auto att = analytic_nodes(c.s).back().support;
    for (const auto& iv : att) {
      for (int i = 0; i <= 20000; ++i) {
        double y = iv.lo + iv.length() * i / 20000.0;
        auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
        double g = 1.0;
        if (it != sorted.end()) g = *it - y;
        if (it != sorted.begin()) g = std::min(g, y - *std::prev(it));
        gap = std::max(gap, g);
      }
    }
    o.require(gap <= delta, tag + ": coverage gap " + std::to_string(gap));
  }
}

void exactness(Outcome& o) {
  for (double s : {1.5, 1.8, 2.0}) {
    auto f = make_tent(s);
    double c1 = f.peak(), c2 = f.eval(c1);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> loglen(std::log(1e-4), std::log(c1 - c2));
    int failures = 0, wrong = 0;
    for (int i = 0; i < 100; ++i) {
      double len = std::exp(loglen(rng));
      double lo = std::uniform_real_distribution<double>(c2, c1 - len)(rng);
      Interval j{lo, lo + len};
      try {
        int steps = expansion_time(f, j);
        Interval img = j;
        for (int k = 0; k < steps; ++k) img = f.image(img);
        if (!(img.lo <= c2 + 1e-12 && img.hi >= c1 - 1e-12)) ++wrong;
      } catch (const Error&) {
        ++failures;
      }
    }
    std::string tag = "s = " + std::to_string(s);
    o.require(failures == 0, tag + ": " + std::to_string(failures) + "/100 beyond the step bound");
    o.require(wrong == 0, tag + ": " + std::to_string(wrong) + " reported times do not cover");
  }
}

void renormalization(Outcome& o) {
  for (double s : {1.1, 1.2, 1.3, 1.4}) {
    auto r = renormalize(s);
    std::string tag = "s = " + std::to_string(s);
    o.require(r.residual <= 1e-9, tag + ": residual " + std::to_string(r.residual));
    // own chart and closed-form maps
    auto tent = [](double a, double y) { return y <= 0.5 ? a * y : a * (1.0 - y); };
    double pi = s / (s + 1.0);
    double c2 = s * (1.0 - s / 2.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double y = c2 + (pi - c2) * i / 999.0;
      double chart_y = (pi - y) / (2.0 * (pi - 0.5));
      double chart_f2 = (pi - tent(s, tent(s, y))) / (2.0 * (pi - 0.5));
      worst = std::max(worst, std::abs(chart_f2 - tent(s * s, chart_y)));
    }
    o.require(worst <= 1e-9, tag + ": independent residual " + std::to_string(worst));
  }
}

void tu_window(Outcome& o) {
  RenderSpec spec;
  spec.family = Family::tu;
  spec.s_lo = 0.99;
  spec.s_hi = 1.005;
  spec.columns = 301;
  spec.transient = 5000;
  spec.samples = 50000;
  spec.y_bins = 600;
  auto cols = render_columns(spec);
  int centre = 0;
  for (int i = 0; i < spec.columns; ++i)
    if (std::abs(cols[i].parameter - 1.0) < std::abs(cols[centre].parameter - 1.0)) centre = i;
  auto three = [&](int i) { return count_components(cols[static_cast<std::size_t>(i)].hist, 2) == 3; };
  o.require(three(centre), "mu = 1 column does not show three intervals");
  if (!o.pass) return;
  int a = centre, b = centre;
  while (a > 0 && three(a - 1)) --a;
  while (b + 1 < spec.columns && three(b + 1)) ++b;
  double lo = cols[a].parameter, hi = cols[b].parameter;
  o.require(near(lo, 0.994, 0.003) && near(hi, 1.001, 0.003),
            "band [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  if (o.pass) o.why << "band [" << lo << ", " << hi << "]";
}

void properties(Outcome& o) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> S(1.05, 2.0), U(0.0, 1.0);
  int involution = 0, partition = 0, refinement = 0, soundness = 0;
  for (int t = 0; t < 40; ++t) {
    double s = S(rng);
    auto f = make_tent(s);
    for (int i = 0; i < 50; ++i) {
      double p = U(rng);
      double q = conjugate(f, p);
      if (std::abs(f.eval(q) - f.eval(p)) > 1e-12 || std::abs(conjugate(f, q) - p) > 1e-12) ++involution;
    }
    auto lp = level_partition(s);
    for (int i = 0; i < 200; ++i) {
      double x = U(rng);
      int hits = 0;
      for (const auto& [k, segs] : lp.levels)
        for (const auto& seg : segs) hits += seg.contains(x) ? 1 : 0;
      if (hits != 1) ++partition;
    }
  }
  for (double s : {1.15, 1.4, 1.8}) {
    const int n = 20000;
    auto cc = chain_recurrent_cells(make_tent(s), n, {64.0 / n, 16.0 / n, 4.0 / n, 1.0 / n});
    for (std::size_t e = 1; e < cc.recurrent_per_eps.size(); ++e)
      for (int i = 0; i < n; ++i)
        if (cc.recurrent_per_eps[e][static_cast<std::size_t>(i)] && !cc.recurrent_per_eps[e - 1][static_cast<std::size_t>(i)])
          ++refinement;
  }
  for (auto f : {make_tent(1.6), make_tent(1.2), make_logistic(3.854), make_tu(1.0)}) {
    auto t = preimage_tree(f, 0.5, 20);
    for (std::size_t d = 1; d < t.levels.size(); ++d)
      for (std::size_t i = 0; i < t.levels[d].size(); ++i) {
        double parent = t.levels[d - 1][static_cast<std::size_t>(t.parents[d][i])];
        if (std::abs(f.eval(t.levels[d][i]) - parent) > 1e-10) ++soundness;
      }
  }
  o.require(involution == 0, std::to_string(involution) + " involution failures");
  o.require(partition == 0, std::to_string(partition) + " points not in exactly one level");
  o.require(refinement == 0, std::to_string(refinement) + " cells recurrent only at a finer epsilon");
  o.require(soundness == 0, std::to_string(soundness) + " tree points off their parent");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> all{
      {"node recovery s=1.8", node_recovery_18},
      {"node recovery s=1.4", node_recovery_14},
      {"depth table", depth_table},
      {"single class for T_2", full_tent},
      {"tower over 50 parameters", tower_grid},
      {"no recurrence below c2 for s=1.8", negative_control},
      {"salpha suite", salpha_suite},
      {"dense backward orbits", dense_orbits},
      {"topological exactness", exactness},
      {"renormalization chart", renormalization},
      {"u_mu period-3 window", tu_window},
      {"property suite", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      all[i].run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %2zu %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, seconds_since(t0),
                o.why.str().empty() ? "" : ": ", o.why.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
