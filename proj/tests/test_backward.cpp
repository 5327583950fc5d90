#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "unimodal/backward.hpp"

using namespace unimodal;
using Catch::Matchers::WithinAbs;

namespace {

using Set = std::vector<Interval>;

Set pts(std::initializer_list<double> xs) {
  Set out;
  for (double x : xs) out.push_back({x, x});
  return out;
}

}  // namespace

TEST_CASE("preimage trees", "[backward][tree]") {
  SECTION("examples") {
    auto t = preimage_tree(make_tent(1.8), 0.18, 1);
    REQUIRE(t.levels.size() == 2);
    REQUIRE(t.levels[1].size() == 2);
    CHECK_THAT(t.levels[1][0], WithinAbs(0.1, 1e-15));
    CHECK_THAT(t.levels[1][1], WithinAbs(0.9, 1e-15));

    for (double s : {1.3, 2.0}) {
      auto z = preimage_tree(make_tent(s), 0.0, 12);
      for (const auto& lvl : z.levels) CHECK(lvl.front() == 0.0);
    }

    auto e = preimage_tree(make_tent(1.8), 0.95, 1);
    CHECK(e.levels[1].empty());
    CHECK(e.total_points() == 1);
  }
  SECTION("filter") {
    Interval left{0.0, 0.5};
    auto t = preimage_tree(make_tent(1.8), 0.5, 10, left);
    for (std::size_t d = 1; d < t.levels.size(); ++d)
      for (double x : t.levels[d]) CHECK(left.contains(x));
  }
  SECTION("soundness, sizes and order") {
    for (auto f : {make_tent(1.6), make_tent(1.2), make_logistic(3.854), make_tu(1.0)}) {
      auto t = preimage_tree(f, 0.5, 22);
      for (std::size_t d = 1; d < t.levels.size(); ++d) {
        const auto& lvl = t.levels[d];
        CHECK(lvl.size() <= (std::size_t{1} << d));
        CHECK(std::is_sorted(lvl.begin(), lvl.end()));
        for (std::size_t i = 1; i < lvl.size(); ++i) CHECK(lvl[i] - lvl[i - 1] > 1e-12);
        for (std::size_t i = 0; i < lvl.size(); ++i) {
          double parent = t.levels[d - 1][static_cast<std::size_t>(t.parents[d][i])];
          CHECK(std::abs(f.eval(lvl[i]) - parent) <= 1e-10);
        }
      }
      // whole paths back to the root; forward rounding grows like L^depth, so
      // only for the tent maps (1.6^22 * 1e-16 is far below 1e-9)
      if (f.label().family != Family::tent) continue;
      const auto& leaves = t.levels.back();
      for (std::size_t i = 0; i < leaves.size(); i += 1 + leaves.size() / 200) {
        double x = leaves[i];
        CHECK(std::abs(f.eval_n(x, t.depth) - t.root) <= 1e-9);
      }
    }
  }
  SECTION("level cap") {
    auto t = preimage_tree(make_tent(2.0), 0.3, 20);
    for (const auto& lvl : t.levels) CHECK(lvl.size() <= kLevelCap + kLevelCap / 2);
    CHECK(t.levels.back().size() >= kLevelCap / 2);
    // extremes survive the thinning
    CHECK(t.levels.back().front() < 1e-6);
    CHECK(t.levels.back().back() > 1.0 - 1e-6);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(preimage_tree(make_tent(1.8), 0.5, 49), Error);
    CHECK_THROWS_AS(preimage_tree(make_tent(1.8), 0.5, -1), Error);
    CHECK_THROWS_AS(preimage_tree(make_tent(1.8), 1.5, 3), Error);
  }
}

TEST_CASE("sα estimates", "[backward][salpha]") {
  SECTION("level 0 collapses onto the fixed endpoint") {
    auto a = salpha(make_tent(1.6), 0.2, 30);
    CHECK(hausdorff(a.intervals, pts({0.0})) <= 0.02);
    CHECK_FALSE(a.degenerate);
  }
  SECTION("level 1 of T_1.6 is {0} and the core") {
    auto a = salpha(make_tent(1.6), 0.5, 30);
    Set want{{0.0, 0.0}, {0.32, 0.8}};
    CHECK(hausdorff(a.intervals, want) <= 0.02);
  }
  SECTION("level 1 of T_1.2 is {0, pi}") {
    auto a = salpha(make_tent(1.2), 0.5455, 34);
    CHECK(hausdorff(a.intervals, pts({0.0, 6.0 / 11.0})) <= 0.02);
  }
  SECTION("set structure") {
    auto a = salpha(make_tent(1.6), 0.5, 30);
    CHECK(std::is_sorted(a.points.begin(), a.points.end()));
    for (std::size_t i = 1; i < a.intervals.size(); ++i)
      CHECK(a.intervals[i].lo - a.intervals[i - 1].hi > a.cluster_tol);
    for (double x : a.points) CHECK(distance(x, a.intervals) == 0.0);
  }
  SECTION("degenerate trees") {
    auto a = salpha(make_tent(1.8), 0.95, 20);
    CHECK(a.degenerate);
    CHECK(a.intervals.empty());
  }
  SECTION("errors") {
    CHECK_THROWS_AS(salpha(make_tent(1.6), 0.5, 19), Error);
    CHECK_THROWS_AS(salpha(make_tent(1.6), 0.5, 30, 0.0), Error);
  }
  SECTION("deeper trees only add limit points") {
    struct Case {
      double s, x;
      int d;
    };
    for (auto c : {Case{1.6, 0.5, 24}, Case{1.2, 0.5455, 30}, Case{1.4, 0.65, 30}, Case{1.8, 0.3, 24}}) {
      auto f = make_tent(c.s);
      auto a = salpha(f, c.x, c.d);
      auto b = salpha(f, c.x, c.d + 4);
      CAPTURE(c.s, c.x);
      CHECK(directed_hausdorff(a.intervals, b.intervals) <= a.cluster_tol);
    }
  }
  SECTION("no spurious mass inside deeper cores") {
    struct Case {
      double s, x;
      int d;
    };
    for (auto c : {Case{1.6, 0.2, 30}, Case{1.2, 0.5455, 34}, Case{1.4, 0.584, 34}, Case{1.15, 0.53, 34}}) {
      CAPTURE(c.s, c.x);
      auto f = make_tent(c.s);
      int k = classify_point(c.s, c.x);
      REQUIRE(k >= 0);
      auto pred = predicted_salpha(c.s, c.x);
      auto a = salpha(f, c.x, c.d);
      auto core = tent_core(critical_orbit(f, 1 << (k + 1)), k);
      for (double y : a.points) {
        bool inside = false;
        for (const auto& iv : core) inside = inside || iv.interior_contains(y);
        if (inside) CHECK(distance(y, pred.set) <= 0.02);
      }
    }
  }
}

TEST_CASE("predicted sα", "[backward][predicted]") {
  auto out = predicted_salpha(1.6, 0.9);
  CHECK(out.level == -1);
  CHECK_FALSE(out.in_scope);
  CHECK(out.set.empty());

  auto p = predicted_salpha(1.6, 0.5);
  CHECK(p.level == 1);
  REQUIRE(p.set.size() == 2);
  CHECK(p.set[0] == Interval{0.0, 0.0});
  CHECK_THAT(p.set[1].lo, WithinAbs(0.32, 1e-12));
  CHECK_THAT(p.set[1].hi, WithinAbs(0.8, 1e-12));

  auto q = predicted_salpha(1.4, 0.6);
  CHECK(q.level == 2);
  REQUIRE(q.set.size() == 4);
  CHECK(q.set[0] == Interval{0.0, 0.0});
  CHECK_THAT(q.set[1].lo, WithinAbs(0.42, 1e-12));
  CHECK_THAT(q.set[2].lo, WithinAbs(7.0 / 12.0, 1e-12));
  CHECK_THAT(q.set[3].hi, WithinAbs(0.7, 1e-12));

  auto z = predicted_salpha(1.6, 0.1);
  CHECK(z.level == 0);
  CHECK(z.set == Set{{0.0, 0.0}});

  CHECK_THROWS_AS(predicted_salpha(1.6, 1.2), Error);
  CHECK_THROWS_AS(predicted_salpha(0.9, 0.5), Error);
}

TEST_CASE("compare_salpha", "[backward][compare]") {
  auto r = compare_salpha(make_tent(1.6), 0.5, 30, 0.02);
  CHECK(r.pass);
  CHECK(r.level == 1);
  CHECK(r.hausdorff <= 0.02);

  SECTION("just right of pi for T_1.4") {
    const double x = 7.0 / 12.0 + 0.001;
    auto rep = compare_salpha(make_tent(1.4), x, 34, 0.02);
    // x sits in the gap between the attractor's intervals, so it is level 1
    CHECK(rep.level == 1);
    CHECK(rep.pass);
  }
  SECTION("wrong level fails by at least the gap to the attractor") {
    auto f = make_tent(1.4);
    const double pi = 7.0 / 12.0;
    auto est = salpha(f, 0.65, 34);
    Set level1{{0.0, 0.0}, {pi, pi}};
    double gap = std::min(pi - 0.5768, 0.588 - pi);
    double d = hausdorff(level1, est.intervals);
    CHECK(d >= gap);
    CHECK(d > 0.02);
    auto right = compare_salpha(f, 0.65, 34, 0.02);
    CHECK(right.level == 2);
    CHECK(right.pass);
  }
  SECTION("level -1 is reported out of scope") {
    auto rep = compare_salpha(make_tent(1.6), 0.9, 30, 0.02);
    CHECK(rep.level == -1);
    CHECK_FALSE(rep.in_scope);
    CHECK(rep.predicted.empty());
    CHECK(rep.estimated.empty());
  }
  CHECK_THROWS_AS(compare_salpha(make_logistic(3.9), 0.5, 30, 0.02), Error);
}

TEST_CASE("dense backward orbits", "[backward][dense]") {
  struct Case {
    double s, x;
  };
  for (auto c : {Case{2.0, 0.3}, Case{1.8, 0.5}, Case{1.4, 0.6}}) {
    CAPTURE(c.s);
    auto f = make_tent(c.s);
    auto d = dense_backward_orbit(f, c.x, 0.01);
    REQUIRE(d.points.size() >= 2);
    CHECK(d.points.front() == c.x);
    CHECK(d.points.size() <= 100000);
    // valid backward orbit
    for (std::size_t i = 0; i + 1 < d.points.size(); ++i) CHECK(std::abs(f.eval(d.points[i + 1]) - d.points[i]) <= 1e-9);
    CHECK(d.max_step_error <= 1e-9);
    // delta-dense on a fine grid of the attractor
    auto att = analytic_nodes(c.s).back().support;
    std::vector<double> sorted = d.points;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& iv : att) {
      for (int i = 0; i <= 10000; ++i) {
        double y = iv.lo + iv.length() * i / 10000.0;
        auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
        double gap = 1.0;
        if (it != sorted.end()) gap = *it - y;
        if (it != sorted.begin()) gap = std::min(gap, y - *std::prev(it));
        CHECK(gap <= 0.01);
      }
      for (double z : d.points) CHECK(distance(z, att) <= 1e-12);
    }
    if (att.size() == 2) {
      // the two intervals are swapped by f, so the orbit alternates
      for (std::size_t i = 0; i + 1 < d.points.size(); ++i) {
        bool a = att[0].contains(d.points[i], 1e-12), b = att[0].contains(d.points[i + 1], 1e-12);
        CHECK(a != b);
      }
    }
  }
  SECTION("errors") {
    CHECK_THROWS_AS(dense_backward_orbit(make_tent(1.8), 0.5, 5e-4), Error);
    CHECK_THROWS_AS(dense_backward_orbit(make_tent(1.4), 0.3, 0.01), Error);
    CHECK_THROWS_AS(dense_backward_orbit(make_logistic(3.9), 0.5, 0.01), Error);
  }
}
