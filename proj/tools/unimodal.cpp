// unimodal: node towers, oracle verification, sα reports and bifurcation
// rasters for tent maps and the u_mu family.
//
// Exit codes: 0 success, 1 verification failure or I/O error, 2 usage or
// parameter error.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <random>
#include <string>

#include "unimodal/unimodal.hpp"

namespace {

using namespace unimodal;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void emit(const json& j, bool compact) { std::cout << (compact ? j.dump() : j.dump(2)) << '\n'; }

json tu_document(double mu) {
  auto u = make_tu(mu);
  auto nodes = tu_nodes(mu);
  auto tr = trapping_region(u, nodes[1]);
  return json{{"family", "tu"},
              {"mu", mu},
              {"map", map_to_json(u)},
              {"nodes", nodes},
              {"trapping_regions", json::array({tr})},
              {"attractor_type", attractor_type_name(classify_attractor(u, nodes))}};
}

struct VerifyOptions {
  double s = 0.0;
  int n = 100000;
  int depth = kDefaultSalphaDepth;
  double eps = 0.0;  // smallest epsilon; 0 selects 2h
  double tol = 4.0;  // match tolerance in cells
  std::uint64_t seed = 0;
};

/// Sample points, one per level: below c2, on each cascade cycle, in the attractor.
std::vector<double> canned_points(double s, const std::vector<Node>& nodes) {
  if (nodes.size() == 1) return {0.3};
  auto f = make_tent(s);
  double c2 = f.eval(f.peak());
  std::vector<double> xs{0.5 * c2};
  for (std::size_t k = 1; k + 1 < nodes.size(); ++k) xs.push_back(nodes[k].support.front().lo);
  xs.push_back(nodes.back().support.front().midpoint());
  return xs;
}

int run_verify(const VerifyOptions& o, bool compact) {
  auto f = make_tent(o.s);
  auto nodes = analytic_nodes(o.s);
  const double h = 1.0 / o.n;
  std::vector<double> eps = o.eps > 0.0 ? std::vector<double>{16.0 * o.eps, 4.0 * o.eps, o.eps} : default_epsilons(h);

  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, json detail) {
    checks.push_back(json{{"check", name}, {"pass", pass}, {"detail", std::move(detail)}});
    all = all && pass;
  };

  auto cc = chain_recurrent_cells(f, o.n, eps);
  auto cg = conley_graph(cc);
  std::optional<bool> tower;
  try {
    tower = verify_tower(cg);
  } catch (const Error& e) {
    record("conley_acyclic", false, e.what());
  }
  record("tower", tower.value_or(false), json{{"classes", cc.classes.size()}, {"edges", cg.edges.size()}});
  auto match = match_nodes(nodes, cc, o.tol * h);
  record("match_nodes", match.pass,
         json{{"analytic", match.analytic_count},
              {"oracle", match.oracle_count},
              {"max_hausdorff_h", match.count_ok ? json(match.max_hausdorff / h) : json(nullptr)}});

  json sa = json::array();
  for (double x : canned_points(o.s, nodes)) {
    auto rep = compare_salpha(f, x, o.depth, 0.02);
    sa.push_back(rep);
    record("salpha", rep.pass, json{{"x", x}, {"level", rep.level}, {"hausdorff", rep.hausdorff}});
  }

  if (o.s > std::sqrt(2.0)) {
    std::mt19937_64 rng(o.seed);
    double c1 = f.peak(), c2 = f.eval(c1);
    std::uniform_real_distribution<double> loglen(std::log(1e-4), std::log(c1 - c2));
    int failures = 0, worst = 0;
    for (int i = 0; i < 20; ++i) {
      double len = std::exp(loglen(rng));
      double lo = std::uniform_real_distribution<double>(c2, c1 - len)(rng);
      try {
        worst = std::max(worst, expansion_time(f, {lo, lo + len}));
      } catch (const Error&) {
        ++failures;
      }
    }
    record("expansion_time", failures == 0, json{{"intervals", 20}, {"failures", failures}, {"max_steps", worst}});
  }

  json out{{"s", o.s}, {"p", node_depth(o.s)}, {"n", o.n}, {"checks", checks},
           {"oracle", oracle_document(o.s, cc, cg, tower, match)}, {"salpha", sa}, {"pass", all}};
  emit(out, compact);
  return all ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qualitative dynamics of tent-like unimodal maps"};
  app.require_subcommand(1);
  bool compact = false;
  app.add_flag("--json", compact, "single-line JSON output");

  double s = 0.0, mu = 1.0, x = 0.0;
  std::string family = "tent";
  int depth = kDefaultSalphaDepth;

  auto* nodes_cmd = app.add_subcommand("nodes", "node tower, trapping regions and level sets");
  nodes_cmd->add_option("--s", s, "tent parameter in (1, 2]");
  nodes_cmd->add_option("--family", family, "tent | tu")->check(CLI::IsMember({"tent", "tu"}));
  nodes_cmd->add_option("--mu", mu, "u_mu parameter (family tu)");
  nodes_cmd->add_flag("--json", compact, "single-line JSON output");

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "cross-check analytic nodes against the chain oracle");
  verify_cmd->add_option("--s", vo.s, "tent parameter in (1, 2]")->required();
  verify_cmd->add_option("--n", vo.n, "grid cells")->check(CLI::Range(100, 10000000));
  verify_cmd->add_option("--depth", vo.depth, "preimage tree depth")->check(CLI::Range(20, kMaxTreeDepth));
  verify_cmd->add_option("--eps", vo.eps, "smallest epsilon (default 2h)");
  verify_cmd->add_option("--seed", vo.seed, "seed for random subintervals");
  verify_cmd->add_option("--tol", vo.tol, "node match tolerance in cells (default 4)")->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--json", compact, "single-line JSON output");

  RenderSpec spec;
  std::optional<double> s_min, s_max;
  auto* bif_cmd = app.add_subcommand("bifurcation", "render a bifurcation diagram");
  bif_cmd->add_option("--family", family, "tent | logistic | tu")->check(CLI::IsMember({"tent", "logistic", "tu"}));
  bif_cmd->add_option("--s-min", s_min, "lowest parameter");
  bif_cmd->add_option("--s-max", s_max, "highest parameter");
  bif_cmd->add_option("--columns", spec.columns, "image width");
  bif_cmd->add_option("--transient", spec.transient, "iterates discarded per column");
  bif_cmd->add_option("--samples", spec.samples, "iterates histogrammed per column");
  bif_cmd->add_option("--bins", spec.y_bins, "image height");
  bif_cmd->add_option("--out", spec.out_path, "output base path");
  bif_cmd->add_flag("--json", compact, "single-line JSON output");

  auto* sa_cmd = app.add_subcommand("salpha", "estimated vs predicted special alpha-limit set");
  sa_cmd->add_option("--s", s, "tent parameter in (1, 2]")->required();
  sa_cmd->add_option("--x", x, "base point in [0, 1]")->required();
  sa_cmd->add_option("--depth", depth, "preimage tree depth")->check(CLI::Range(20, kMaxTreeDepth));
  sa_cmd->add_flag("--json", compact, "single-line JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*nodes_cmd) {
      if (family == "tu") emit(tu_document(mu), compact);
      else emit(nodes_document(s), compact);
      return kExitOk;
    }
    if (*verify_cmd) return run_verify(vo, compact);
    if (*bif_cmd) {
      spec.family = family_from_name(family);
      Interval def = spec.family == Family::tu ? Interval{0.99, 1.005}
                     : spec.family == Family::logistic ? Interval{2.8, 4.0}
                                                       : Interval{1.01, 2.0};
      spec.s_lo = s_min.value_or(def.lo);
      spec.s_hi = s_max.value_or(spec.columns == 1 ? spec.s_lo : def.hi);
      auto cols = render_columns(spec);
      auto files = write_render(spec, cols);
      json comps = json::array();
      for (const auto& c : cols) comps.push_back(count_components(c.hist));
      emit(json{{"family", family},
                {"columns", spec.columns},
                {"range", json::array({spec.s_lo, spec.s_hi})},
                {"files", json{{"density", files.density}, {"overlay", files.overlay}, {"csv", files.csv}}},
                {"components", comps}},
           compact);
      return kExitOk;
    }
    if (*sa_cmd) {
      auto rep = compare_salpha(make_tent(s), x, depth, 0.02);
      emit(rep, compact);
      return rep.pass ? kExitOk : kExitFail;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::invalid_parameter:
      case Errc::out_of_domain: return kExitUsage;
      default: return kExitFail;
    }
  }
  return kExitUsage;
}
