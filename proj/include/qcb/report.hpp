/// \file
/// JSON encodings of results. Keys keep insertion order so that artifacts are
/// stable byte for byte; non-finite numbers become null.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcb/bounds.hpp"
#include "qcb/certify.hpp"
#include "qcb/core.hpp"
#include "qcb/modulus.hpp"
#include "qcb/quad.hpp"

namespace qcb {

using Json = nlohmann::ordered_json;

inline constexpr const char* tool_name = "qcb";
inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* certificate_schema = "qcb-certificate/1";
inline constexpr const char* scenario_schema = "qcb-scenario/1";

namespace report {

inline Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json complex(Complex z) { return Json::array({num(z.real()), num(z.imag())}); }

inline Json pairs(const std::vector<std::pair<double, double>>& v) {
  Json a = Json::array();
  for (const auto& [x, y] : v) a.push_back(Json::array({num(x), num(y)}));
  return a;
}

inline Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline Json to_json(const QuadratureResult& q) {
  return {{"value", num(q.value)},
          {"abs_error_estimate", num(q.abs_error_estimate)},
          {"cells", q.cells},
          {"clipped_fraction", num(q.clipped_fraction)},
          {"converged", q.converged}};
}

inline Json to_json(const DilatationSample& s) {
  return {{"z", complex(s.z)},         {"z0", complex(s.z0)},       {"mu", complex(s.mu)},
          {"K", num(s.K_value)},       {"D", num(s.D_value)},       {"D_neg", num(s.D_neg_value)},
          {"clipped", s.clipped}};
}

inline Json to_json(const LimitVerdict& v) {
  Json j = {{"status", to_string(v.status)}};
  if (v.status == LimitStatus::ConvergesTo) j["value"] = num(v.value);
  j["trace"] = pairs(v.trace);
  return j;
}

inline Json to_json(const ModulusEstimate& e) {
  return {{"mod_primal", num(e.mod_primal)},
          {"mod_dual", num(e.mod_dual)},
          {"value", num(e.value)},
          {"discrepancy", num(e.discrepancy)},
          {"lambda_joining", num(e.lambda_joining)},
          {"lambda_dividing", num(e.lambda_dividing)},
          {"iterations_primal", e.iterations_primal},
          {"iterations_dual", e.iterations_dual}};
}

inline Json to_json(const SemiannulusSpec& s) {
  Json j;
  if (s.is_disk()) {
    j = {{"kind", "disk"}, {"zeta", complex(s.zeta)}, {"r1", num(s.r)}, {"r2", num(s.R)}};
  } else {
    j = {{"kind", "half_plane"}, {"t", num(s.t)}, {"r", num(s.r)}, {"R", num(s.R)}};
  }
  if (s.sector) j["sector"] = Json::array({num(s.sector->theta1), num(s.sector->theta2)});
  return j;
}

inline Json to_json(const RoundSubannulus& a) {
  return {{"r", num(a.r)}, {"R", num(a.R)}, {"log_ratio", num(a.log_ratio())}};
}

inline Json to_json(const ExtensionCheck& c) {
  return {{"verdict", to_json(c.verdict)}, {"slope", num(c.slope)}, {"method", c.method},
          {"warnings", c.warnings}};
}

inline Json to_json(const BoundaryExponent& b) {
  return {{"alpha_hat", num(b.alpha_hat)},
          {"deriv_hat", b.deriv_hat ? num(*b.deriv_hat) : Json(nullptr)},
          {"residual", num(b.residual)},
          {"poor_fit", b.poor_fit}};
}

inline Json to_json(const DiameterFuzzRow& r) {
  return {{"zeta", complex(r.config.zeta)}, {"r1", num(r.config.r1)},   {"r2", num(r.config.r2)},
          {"a", complex(r.config.a)},       {"phi", num(r.config.phi)}, {"mod_estimate", num(r.mod_estimate)},
          {"lhs", num(r.lhs)},              {"rhs", num(r.rhs)},        {"margin", num(r.margin())}};
}

inline Json constants() {
  const auto& c = bound_constants();
  return {{"C_disk", num(c.C_disk)},
          {"C_halfplane", num(c.C_halfplane)},
          {"separation_loss", num(c.separation_loss)}};
}

/// The certificate document; `input` describes the field and options used.
inline Json to_json(const RegularityCertificate& c, const Json& input = Json::object()) {
  Json grids = {{"subject", c.subject}};
  if (c.t) grids["t"] = num(*c.t);
  if (c.interval) grids["interval"] = Json::array({num(c.interval->first), num(c.interval->second)});
  if (c.zeta) grids["zeta"] = complex(*c.zeta);
  grids["t_grid"] = numbers(c.t_grid);
  grids["schedule"] = numbers(c.schedule);

  Json verdicts = Json::array();
  for (const auto& v : c.verdicts) {
    Json j = {{"condition", v.condition}};
    if (v.limit) j["limit"] = to_json(*v.limit);
    if (v.bound) j["bound"] = num(*v.bound);
    j["quadrature_converged"] = v.quadrature_converged;
    if (!v.note.empty()) j["note"] = v.note;
    verdicts.push_back(std::move(j));
  }
  Json traces = Json::array();
  for (const auto& t : c.traces) traces.push_back({{"name", t.name}, {"points", pairs(t.points)}});

  Json out = {{"schema", certificate_schema}, {"input", input}, {"grids", grids},
              {"verdicts", verdicts},         {"traces", traces}};
  Json derived = Json::object();
  if (c.derivative) derived["derivative"] = num(*c.derivative);
  if (c.M) derived["M"] = num(*c.M);
  if (c.alpha) derived["alpha"] = num(*c.alpha);
  derived["max_clipped_fraction"] = num(c.max_clipped_fraction);
  Json k = constants();
  k.update(derived);
  out["constants"] = k;
  out["conclusion"] = to_string(c.conclusion);
  out["warnings"] = c.warnings;
  return out;
}

}  // namespace report
}  // namespace qcb
