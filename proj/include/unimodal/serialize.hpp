#pragma once

// JSON documents for maps, cycles, node towers, oracle runs and sα reports.

#include <json.hpp>
#include <string>
#include <vector>

#include "backward.hpp"
#include "chainoracle.hpp"
#include "maps.hpp"
#include "orbits.hpp"
#include "structure.hpp"

namespace unimodal {

using json = nlohmann::json;

inline void to_json(json& j, const Interval& iv) { j = json::array({iv.lo, iv.hi}); }
inline void from_json(const json& j, Interval& iv) {
  iv.lo = j.at(0).get<double>();
  iv.hi = j.at(1).get<double>();
}

inline Family family_from_name(const std::string& s) {
  if (s == "tent") return Family::tent;
  if (s == "logistic") return Family::logistic;
  if (s == "tu") return Family::tu;
  if (s == "custom") return Family::custom;
  throw Error(Errc::invalid_parameter, "unknown family '" + s + "'");
}

inline void to_json(json& j, const Branch& b) {
  j = json{{"lo", b.domain.lo}, {"hi", b.domain.hi}};
  if (const auto* a = std::get_if<Affine>(&b.shape)) {
    j["shape"] = "affine";
    j["coeffs"] = json::array({a->slope, a->intercept});
  } else {
    j["shape"] = "quadratic";
    j["coeffs"] = json::array({std::get<Quadratic>(b.shape).k});
  }
  j["direction"] = b.direction == Direction::increasing ? "increasing" : "decreasing";
}

inline Branch branch_from_json(const json& j) {
  Branch b;
  b.domain = {j.at("lo").get<double>(), j.at("hi").get<double>()};
  const auto shape = j.at("shape").get<std::string>();
  const auto& co = j.at("coeffs");
  if (shape == "affine") b.shape = Affine{co.at(0).get<double>(), co.at(1).get<double>()};
  else if (shape == "quadratic") b.shape = Quadratic{co.at(0).get<double>()};
  else throw Error(Errc::invalid_parameter, "unknown branch shape '" + shape + "'");
  const auto dir = j.at("direction").get<std::string>();
  if (dir != "increasing" && dir != "decreasing") throw Error(Errc::invalid_parameter, "unknown direction");
  b.direction = dir == "increasing" ? Direction::increasing : Direction::decreasing;
  return b;
}

inline json map_to_json(const PiecewiseMap& f) {
  json br = json::array();
  for (const auto& b : f.branches()) br.push_back(b);
  json j{{"family", family_name(f.label().family)},
         {"parameter", f.label().parameter},
         {"critical", f.critical()},
         {"branches", br}};
  if (!f.label().note.empty()) j["note"] = f.label().note;
  return j;
}

inline PiecewiseMap map_from_json(const json& j) {
  std::vector<Branch> br;
  for (const auto& b : j.at("branches")) br.push_back(branch_from_json(b));
  MapLabel label{family_from_name(j.at("family").get<std::string>()), j.at("parameter").get<double>(),
                 j.value("note", std::string{})};
  double c = j.contains("critical") ? j.at("critical").get<double>() : 0.5;
  return PiecewiseMap(std::move(br), c, std::move(label));
}

inline void to_json(json& j, const Cycle& c) {
  j = json{{"period", c.period}, {"points", c.points}, {"multiplier", c.multiplier}};
}
inline void from_json(const json& j, Cycle& c) {
  c.period = j.at("period").get<int>();
  c.points = j.at("points").get<std::vector<double>>();
  c.multiplier = j.at("multiplier").get<double>();
}

inline void to_json(json& j, const Node& n) {
  j = json{{"index", n.index}, {"kind", node_kind_name(n.kind)}, {"support", n.support}};
  if (n.cycle) j["cycle"] = *n.cycle;
}

inline void to_json(json& j, const TrappingRegion& tr) {
  j = json{{"intervals", tr.intervals}, {"period", tr.period}, {"cyclic", tr.cyclic}, {"flip", tr.flip}};
  if (tr.gamma) j["gamma"] = *tr.gamma;
}

inline json segment_to_json(const Segment& s) {
  return json{{"lo", s.lo}, {"hi", s.hi}, {"lo_closed", s.lo_closed}, {"hi_closed", s.hi_closed}};
}

inline json levels_to_json(const LevelPartition& lp) {
  json j = json::object();
  for (const auto& [k, segs] : lp.levels) {
    json arr = json::array();
    for (const auto& s : segs) arr.push_back(segment_to_json(s));
    j[std::to_string(k)] = arr;
  }
  return j;
}

/// {s, p, nodes, trapping_regions, levels} for T_s.
inline json nodes_document(double s) {
  auto f = make_tent(s);
  auto nodes = analytic_nodes(s);
  json regions = json::array();
  for (const auto& n : nodes) {
    if (n.is_attractor()) continue;
    json r = trapping_region(f, n);
    r["node"] = n.index;
    regions.push_back(r);
  }
  json j{{"s", s}, {"p", node_depth(s)}, {"nodes", nodes}, {"trapping_regions", regions},
         {"levels", levels_to_json(level_partition(s))}};
  j["attractor_type"] = attractor_type_name(classify_attractor(f, nodes));
  return j;
}

inline json classes_to_json(const ChainClasses& cc) {
  json arr = json::array();
  for (std::size_t k = 0; k < cc.classes.size(); ++k) {
    json runs = json::array();
    for (auto [b, e] : cc.runs(k)) runs.push_back(json::array({b, e}));
    arr.push_back(json{{"cells_lo_hi_ranges", runs}, {"support", cc.support(k)}});
  }
  return arr;
}

inline json oracle_document(double s, const ChainClasses& cc, const ConleyGraph& cg, std::optional<bool> tower,
                            const MatchReport& match) {
  json edges = json::array();
  for (auto [i, j] : cg.edges) edges.push_back(json::array({i, j}));
  json pairs = json::array();
  for (auto [i, j] : match.pairs) pairs.push_back(json::array({i, j}));
  json m{{"pairs", pairs},
         {"hausdorff", match.hausdorff},
         {"max_hausdorff", match.count_ok ? json(match.max_hausdorff) : json(nullptr)},
         {"count_ok", match.count_ok},
         {"pass", match.pass}};
  return json{{"s", s},
              {"n", cc.n},
              {"epsilons", cc.epsilons},
              {"classes", classes_to_json(cc)},
              {"edges", edges},
              {"tower", tower ? json(*tower) : json(nullptr)},
              {"match", m}};
}

inline void to_json(json& j, const SalphaReport& r) {
  j = json{{"s", r.s},
           {"x", r.x},
           {"level", r.level},
           {"predicted", r.predicted},
           {"estimated", r.estimated},
           {"hausdorff", r.hausdorff},
           {"pass", r.pass}};
  if (!r.in_scope) j["note"] = "level -1: x lies above f(c), no prediction is made";
}

}  // namespace unimodal
