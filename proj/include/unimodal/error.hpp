#pragma once

#include <stdexcept>
#include <string>

namespace unimodal {

enum class Errc {
  invalid_parameter,
  out_of_domain,
  no_fixed_point,
  no_sign_change,
  lap_straddle,
  critical_on_cycle,
  bracket_failed,
  continuity,
  not_renormalizable,
  commutation_failed,
  attractor_node,
  no_cantor_repellor,
  flip_region,
  cyclic_graph,
  timeout,
  coverage_failed,
  io,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_parameter: return "invalid_parameter";
    case Errc::out_of_domain: return "out_of_domain";
    case Errc::no_fixed_point: return "no_fixed_point";
    case Errc::no_sign_change: return "no_sign_change";
    case Errc::lap_straddle: return "lap_straddle";
    case Errc::critical_on_cycle: return "critical_on_cycle";
    case Errc::bracket_failed: return "bracket_failed";
    case Errc::continuity: return "continuity";
    case Errc::not_renormalizable: return "not_renormalizable";
    case Errc::commutation_failed: return "commutation_failed";
    case Errc::attractor_node: return "attractor_node";
    case Errc::no_cantor_repellor: return "no_cantor_repellor";
    case Errc::flip_region: return "flip_region";
    case Errc::cyclic_graph: return "cyclic_graph";
    case Errc::timeout: return "timeout";
    case Errc::coverage_failed: return "coverage_failed";
    case Errc::io: return "io";
  }
  return "unknown";
}

/// Every failure in the library is reported through this exception; `code()`
/// lets callers (and the CLI exit-code mapping) branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace unimodal
