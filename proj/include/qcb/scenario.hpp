/// \file
/// Scenario files: validation, default materialization and execution.
///
/// A scenario is a JSON object
///   { "schema": "qcb-scenario/1", "task": ..., "seed": 0,
///     "field": {...}, "map": {...}, "params": {...},
///     "output": {"path": ..., "format": "json" | "csv"} }
/// Every key is checked before anything runs; the artifact echoes the
/// effective configuration with all defaults filled in. Thread count never
/// changes results and is therefore not part of the echo.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qcb/bounds.hpp"
#include "qcb/certify.hpp"
#include "qcb/core.hpp"
#include "qcb/gallery.hpp"
#include "qcb/modulus.hpp"
#include "qcb/quad.hpp"
#include "qcb/report.hpp"
#include "qcb/sampled.hpp"

namespace qcb {

class ScenarioError : public Error {
 public:
  explicit ScenarioError(const std::string& msg) : Error("ScenarioError: " + msg) {}
};

enum ExitCode : int { ExitOk = 0, ExitValidation = 2, ExitNumerical = 3 };

/// Numerical failures exit with 3; every other library error is a validation error.
inline bool is_numerical_failure(const std::exception& e) {
  return dynamic_cast<const EvaluationError*>(&e) || dynamic_cast<const DegenerateCell*>(&e) ||
         dynamic_cast<const UnboundedImage*>(&e) || dynamic_cast<const SolveFailure*>(&e) ||
         dynamic_cast<const NotSeparating*>(&e) || dynamic_cast<const GridTooCoarse*>(&e) ||
         dynamic_cast<const std::bad_alloc*>(&e);
}

struct RunOptions {
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> out_path;
  unsigned threads = 1;
  std::filesystem::path base_dir;  // relative grid/mesh paths resolve here
};

struct RunResult {
  int exit_code = ExitOk;
  std::string artifact;  // empty when validation failed before execution
  std::string format = "json";
  std::optional<std::string> out_path;
  std::string message;
};

namespace scenario {

/// One JSON object of the scenario with its echo; records consumed keys.
class Section {
 public:
  Section(const Json* in, Json* root, Json::json_pointer at, std::string path)
      : in_(in), root_(root), at_(std::move(at)), path_(std::move(path)) {
    if (in_ && !in_->is_object()) fail("", "must be an object");
    if (echo().is_null()) echo() = Json::object();
  }

  /// Presence test; also marks the key as known.
  bool has(const std::string& key) {
    seen_.insert(key);
    return in_ && in_->contains(key) && !(*in_)[key].is_null();
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt,
                std::optional<double> override_value = std::nullopt) {
    const Json* j = get(key);
    double v;
    if (override_value) {
      v = *override_value;
    } else if (j) {
      if (!j->is_number()) fail(key, "must be a number");
      v = j->get<double>();
    } else if (def) {
      v = *def;
    } else {
      fail(key, "is required");
    }
    if (!std::isfinite(v)) fail(key, "must be finite");
    echo()[key] = v;
    return v;
  }

  long long integer(const std::string& key, long long def, long long lo, long long hi) {
    const Json* j = get(key);
    long long v = def;
    if (j) {
      if (!j->is_number_integer()) fail(key, "must be an integer");
      v = j->get<long long>();
    }
    if (v < lo || v > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    echo()[key] = v;
    return v;
  }

  bool boolean(const std::string& key, bool def) {
    const Json* j = get(key);
    bool v = def;
    if (j) {
      if (!j->is_boolean()) fail(key, "must be a boolean");
      v = j->get<bool>();
    }
    echo()[key] = v;
    return v;
  }

  std::string text(const std::string& key, std::optional<std::string> def = std::nullopt,
                   std::vector<std::string> allowed = {}) {
    const Json* j = get(key);
    std::string v;
    if (j) {
      if (!j->is_string()) fail(key, "must be a string");
      v = j->get<std::string>();
    } else if (def) {
      v = *def;
    } else {
      fail(key, "is required");
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(key, "must be one of {" + list + "}, got '" + v + "'");
    }
    echo()[key] = v;
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def = {}) {
    const Json* j = get(key);
    std::vector<double> v = std::move(def);
    if (j) {
      if (!j->is_array()) fail(key, "must be an array of numbers");
      v.clear();
      for (const auto& x : *j) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "must be an array of finite numbers");
        v.push_back(x.get<double>());
      }
    }
    echo()[key] = report::numbers(v);
    return v;
  }

  Complex point(const std::string& key, std::optional<Complex> def = std::nullopt) {
    const Json* j = get(key);
    Complex v;
    if (j) {
      v = parse_point(key, *j);
    } else if (def) {
      v = *def;
    } else {
      fail(key, "is required");
    }
    echo()[key] = report::complex(v);
    return v;
  }

  std::vector<Complex> points(const std::string& key) {
    const Json* j = get(key);
    if (!j) fail(key, "is required");
    if (!j->is_array() || j->empty()) fail(key, "must be a non-empty array of [x, y] pairs");
    std::vector<Complex> v;
    Json arr = Json::array();
    for (const auto& p : *j) {
      v.push_back(parse_point(key, p));
      arr.push_back(report::complex(v.back()));
    }
    echo()[key] = arr;
    return v;
  }

  std::pair<double, double> interval(const std::string& key, std::optional<std::pair<double, double>> def = {}) {
    const Json* j = get(key);
    std::pair<double, double> v;
    if (j) {
      if (!j->is_array() || j->size() != 2 || !(*j)[0].is_number() || !(*j)[1].is_number())
        fail(key, "must be [a, b]");
      v = {(*j)[0].get<double>(), (*j)[1].get<double>()};
      if (!(v.first <= v.second)) fail(key, "needs a <= b");
    } else if (def) {
      v = *def;
    } else {
      fail(key, "is required");
    }
    echo()[key] = Json::array({v.first, v.second});
    return v;
  }

  Params params(const std::string& key) {
    const Json* j = get(key);
    Params p;
    if (j) {
      if (!j->is_object()) fail(key, "must be an object of numbers");
      for (const auto& [k, x] : j->items()) {
        if (!x.is_number()) fail(key + "." + k, "must be a number");
        p[k] = x.get<double>();
      }
    }
    Json obj = Json::object();
    for (const auto& [k, x] : p) obj[k] = x;
    echo()[key] = obj;
    return p;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> def) {
    const Json* j = get(key);
    std::vector<std::string> v = std::move(def);
    if (j) {
      if (!j->is_array()) fail(key, "must be an array of strings");
      v.clear();
      for (const auto& x : *j) {
        if (!x.is_string()) fail(key, "must be an array of strings");
        v.push_back(x.get<std::string>());
      }
    }
    echo()[key] = v;
    return v;
  }

  /// Echoes the catalog defaults of a gallery entry under `key`.
  void echo_catalog_defaults(const std::string& key, const std::string& name) {
    for (const auto& e : gallery_catalog()) {
      if (e.name != name) continue;
      Json& obj = echo()[key];
      for (const auto& ps : e.params)
        if (!obj.contains(ps.name)) obj[ps.name] = ps.default_value;
    }
  }

  Section child(const std::string& key) {
    const Json* j = get(key);
    return Section(j, root_, at_ / key, join(key));
  }

  /// Rejects keys that were never read.
  void done() const {
    if (!in_) return;
    for (const auto& [k, v] : in_->items())
      if (!seen_.count(k)) throw ScenarioError("unknown key '" + join(k) + "'");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ScenarioError("'" + (key.empty() ? path_ : join(key)) + "' " + what);
  }

 private:
  const Json* in_;
  Json* root_;  // addressed by pointer: ordered objects may relocate on insert
  Json::json_pointer at_;
  std::string path_;
  std::set<std::string> seen_;

  Json& echo() { return (*root_)[at_]; }

  const Json* get(const std::string& key) {
    if (!has(key)) return nullptr;
    return &(*in_)[key];
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  Complex parse_point(const std::string& key, const Json& p) const {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      fail(key, "points must be [x, y]");
    const Complex z(p[0].get<double>(), p[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(key, "points must be finite");
    return z;
  }
};

/// Everything a task produces. Tabular tasks fill columns/rows; the JSON
/// artifact then carries the rows as objects under result.rows.
struct Output {
  Json result = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  std::vector<std::string> warnings;

  void warn(const std::string& w) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
};

using Job = std::function<void(Output&)>;

struct Context {
  Json effective;
  std::string format;
  std::optional<std::string> out_path;
  std::uint64_t seed = 0;
  const RunOptions* opt = nullptr;
};

inline std::string resolve(const RunOptions& opt, const std::string& path) {
  const std::filesystem::path p(path);
  return (p.is_absolute() || opt.base_dir.empty()) ? path : (opt.base_dir / p).string();
}

inline BeltramiField read_field(Section s, const RunOptions& opt) {
  if (s.has("grid")) {
    const std::string path = s.text("grid");
    const std::string dom = s.text("domain", "upper_half_plane", {"upper_half_plane", "unit_disk"});
    const double clip = s.number("clip_epsilon", 1e-9);
    s.done();
    const SampledGrid g = SampledGrid::load(resolve(opt, path));
    return g.field(dom == "unit_disk" ? Domain::UnitDisk : Domain::UpperHalfPlane, "grid:" + path, clip);
  }
  const std::string name = s.text("name");
  const Params p = s.params("params");
  const double clip = s.number("clip_epsilon", 1e-9);
  s.done();
  BeltramiField f = make_field(name, p, clip);
  s.echo_catalog_defaults("params", name);
  return f;
}

inline NamedMap read_map(Section s) {
  const std::string name = s.text("name");
  const Params p = s.params("params");
  s.done();
  NamedMap m = gallery_map(name, p);
  s.echo_catalog_defaults("params", name);
  return m;
}

inline SemiannulusSpec read_region(Section s) {
  const std::string kind = s.text("kind", "half_plane", {"half_plane", "disk", "infinity"});
  SemiannulusSpec spec;
  if (kind == "disk") {
    const Complex zeta = s.point("zeta", Complex(1.0, 0.0));
    const double r1 = s.number("r1"), r2 = s.number("r2");
    spec = SemiannulusSpec::disk(zeta, r1, r2);
  } else if (kind == "infinity") {
    const double r = s.number("r"), R = s.number("R");
    spec = SemiannulusSpec::at_infinity(r, R);
  } else {
    const double t = s.number("t", 0.0);
    const double r = s.number("r"), R = s.number("R");
    spec = SemiannulusSpec::half_plane(t, r, R);
  }
  if (s.has("sector")) {
    const auto sec = s.interval("sector");
    spec = spec.with_sector(sec.first, sec.second);
  }
  s.done();
  return spec;
}

inline QuadOptions read_quad(Section& p, const Context& c, double tol_default) {
  QuadOptions q;
  q.abs_tol = q.rel_tol = p.number("tol", tol_default, c.opt->tol);
  if (!(q.abs_tol > 0.0)) p.fail("tol", "must be positive");
  q.base_theta = static_cast<int>(p.integer("base_theta", 16, 2, 4096));
  q.max_cells = static_cast<std::size_t>(p.integer("max_cells", 1 << 20, 16, 1ll << 30));
  q.threads = c.opt->threads;
  return q;
}

inline void note_quadrature(Output& out, const QuadratureResult& q, const std::string& what) {
  if (!q.converged) out.warn("ToleranceNotReached: " + what);
  if (q.clipped_fraction > 0.0) out.warn("clipping active: " + what);
}

/// Schedules given explicitly, or materialized from the library default.
inline std::vector<double> read_schedule(Section& p, const std::string& key, std::vector<double> def) {
  return p.numbers(key, std::move(def));
}

inline void require_field(const BeltramiField* f, Section& root) {
  if (!f) root.fail("field", "is required for this task");
}

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

inline Job prepare_dilatation(Section& root, Section p, Context&, std::optional<BeltramiField> field) {
  require_field(field ? &*field : nullptr, root);
  const Complex z0 = p.point("z0", Complex(0.0, 0.0));
  const auto pts = p.points("points");
  p.done();
  for (Complex z : pts) {
    if (!field->contains(z)) p.fail("points", "contains a point outside the field's domain");
    if (z == z0) p.fail("points", "contains z0");
  }
  return [f = *field, z0, pts](Output& out) {
    out.columns = {"x", "y", "z0_x", "z0_y", "mu_re", "mu_im", "K", "D", "D_neg", "clipped"};
    for (Complex z : pts) {
      const DilatationSample s = directional_dilatation(f, z0, z);
      if (s.clipped) out.warn("clipping active at one or more points");
      out.rows.push_back({z.real(), z.imag(), z0.real(), z0.imag(), s.mu.real(), s.mu.imag(),
                          report::num(s.K_value), report::num(s.D_value), report::num(s.D_neg_value),
                          s.clipped});
    }
  };
}

inline Job prepare_integrate(Section& root, Section p, Context& c, std::optional<BeltramiField> field) {
  require_field(field ? &*field : nullptr, root);
  const SemiannulusSpec spec = read_region(p.child("region"));
  std::vector<std::string> def;
  for (KernelKind k : all_kernels)
    if (is_disk_kernel(k) == spec.is_disk()) def.push_back(to_string(k));
  const auto names = p.strings("kernels", def);
  std::vector<KernelKind> kernels;
  for (const auto& n : names) {
    const KernelKind k = kernel_from_string(n);
    if (is_disk_kernel(k) != spec.is_disk()) p.fail("kernels", "kernel " + n + " does not match the region");
    kernels.push_back(k);
  }
  if (kernels.empty()) p.fail("kernels", "must not be empty");
  const QuadOptions q = read_quad(p, c, 1e-9);
  p.done();
  if ((field->domain() == Domain::UnitDisk) != spec.is_disk())
    throw DomainMismatch("field domain does not match the region");
  return [f = *field, spec, kernels, q](Output& out) {
    out.result["region"] = report::to_json(spec);
    out.columns = {"kernel", "value", "abs_error_estimate", "cells", "clipped_fraction", "converged"};
    for (KernelKind k : kernels) {
      const QuadratureResult r = annulus_integral(f, spec, k, q);
      note_quadrature(out, r, to_string(k));
      out.rows.push_back({to_string(k), report::num(r.value), report::num(r.abs_error_estimate), r.cells,
                          report::num(r.clipped_fraction), r.converged});
    }
  };
}

inline Job prepare_modulus(Section& root, Section p, Context& c, std::optional<BeltramiField> field,
                           std::optional<NamedMap> map) {
  const std::string method = p.text("method", "mesh", {"mesh", "pullback", "file"});
  SolverOptions so;
  so.rel_residual = p.number("tol", 1e-10, c.opt->tol);
  if (!(so.rel_residual > 0.0)) p.fail("tol", "must be positive");
  so.max_iterations = static_cast<int>(p.integer("max_iterations", 0, 0, 100000000));
  so.threads = c.opt->threads;
  const bool reflect = p.boolean("reflect", false);

  if (method == "file") {
    const std::string path = p.text("mesh_file");
    p.done();
    if (field || map) root.fail("method", "'file' takes neither field nor map");
    return [path = resolve(*c.opt, path), so, reflect](Output& out) {
      std::ifstream in(path);
      if (!in) throw FormatError("cannot open mesh file " + path);
      const CurvedQuadMesh mesh = read_mesh(in);
      const ModulusEstimate e = discrete_modulus(mesh, so);
      out.result["estimate"] = report::to_json(e);
      if (reflect) out.result["reflected"] = report::to_json(reflected_ring_modulus(mesh, so));
    };
  }

  const SemiannulusSpec spec = read_region(p.child("region"));
  const auto n = static_cast<std::size_t>(p.integer("n", 256, 8, 8192));
  const auto m = static_cast<std::size_t>(p.integer("m", static_cast<long long>(n), 8, 8192));
  if (method == "pullback") {
    PullbackOptions po;
    po.end_floor = p.number("end_floor", po.end_floor);
    po.graded = p.boolean("graded", po.graded);
    po.solver = so;
    p.done();
    if (map) root.fail("map", "the pullback method reads the coefficient from 'field'");
    require_field(field ? &*field : nullptr, root);
    if (reflect) p.fail("reflect", "needs the mesh method");
    return [f = *field, spec, n, m, po](Output& out) {
      out.result["region"] = report::to_json(spec);
      out.result["estimate"] = report::to_json(beltrami_modulus(f, spec, n, m, po));
      if (spec.sector) return;
      out.result["canonical"] = report::num(canonical_modulus(spec));
    };
  }
  MeshOptions mo;
  mo.end_margin = p.number("end_margin", mo.end_margin);
  mo.graded = p.boolean("graded", mo.graded);
  p.done();
  if (field) root.fail("field", "the mesh method meshes the image of 'map'");
  const NamedMap f = map ? *map : identity_map(spec.is_disk() ? Domain::UnitDisk : Domain::UpperHalfPlane);
  if (!map) {
    c.effective["map"] = {{"name", "identity"}, {"params", Json::object()}};
    if (spec.is_disk()) c.effective["map"]["params"]["disk"] = 1.0;
  }
  return [f, spec, n, m, mo, so, reflect](Output& out) {
    out.result["region"] = report::to_json(spec);
    const CurvedQuadMesh mesh = mesh_region(f, spec, n, m, mo);
    out.result["estimate"] = report::to_json(discrete_modulus(mesh, so));
    if (!spec.sector) out.result["canonical"] = report::num(canonical_modulus(spec));
    if (reflect) out.result["reflected"] = report::to_json(reflected_ring_modulus(mesh, so));
  };
}

inline Job prepare_bounds_fuzz(Section&, Section p, Context& c) {
  const std::string kind = p.text("kind", "disk_diameter", {"disk_diameter", "round_subannulus"});
  const auto count = static_cast<std::size_t>(p.integer("count", kind == "disk_diameter" ? 100 : 20, 1, 100000));
  const auto mesh_n = static_cast<std::size_t>(p.integer("mesh_n", kind == "disk_diameter" ? 48 : 64, 8, 4096));
  const std::uint64_t seed = c.seed;
  const unsigned threads = c.opt->threads;
  if (kind == "disk_diameter") {
    const auto res = static_cast<std::size_t>(p.integer("resolution", 4096, 16, 1 << 22));
    p.done();
    return [count, seed, mesh_n, res, threads](Output& out) {
      const auto rows = fuzz_disk_diameter(count, seed, mesh_n, res, threads);
      out.columns = {"index", "zeta_re", "zeta_im", "r1", "r2", "a_re", "a_im", "phi",
                     "mod_estimate", "lhs", "rhs", "margin"};
      double worst = std::numeric_limits<double>::infinity();
      std::size_t violations = 0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        worst = std::min(worst, r.margin());
        violations += r.margin() < 0.0 ? 1 : 0;
        out.rows.push_back({k, r.config.zeta.real(), r.config.zeta.imag(), r.config.r1, r.config.r2,
                            r.config.a.real(), r.config.a.imag(), r.config.phi, report::num(r.mod_estimate),
                            report::num(r.lhs), report::num(r.rhs), report::num(r.margin())});
      }
      out.result["constant"] = report::num(bound_constants().C_disk);
      out.result["worst_margin"] = report::num(worst);
      out.result["violations"] = violations;
      if (violations) out.warn("bound violated in " + std::to_string(violations) + " configurations");
    };
  }
  const auto mesh_m = static_cast<std::size_t>(p.integer("mesh_m", static_cast<long long>(4 * mesh_n), 8, 16384));
  p.done();
  return [count, seed, mesh_n, mesh_m, threads](Output& out) {
    const auto rings = random_rings(count, seed);
    std::vector<std::vector<Json>> rows(rings.size());
    parallel_for(rings.size(), threads, [&](std::size_t k) {
      const CurvedQuadMesh B = rings[k].mesh(mesh_n, mesh_m);
      const ModulusEstimate e = discrete_modulus(B);
      const RoundSubannulus a = max_round_subannulus(B, Complex(0.0, 0.0));
      rows[k] = {k, report::num(e.value), report::num(a.r), report::num(a.R), report::num(a.log_ratio()),
                 report::num(a.log_ratio() - (e.value - bound_constants().separation_loss))};
    });
    out.columns = {"index", "mod_B", "r", "R", "log_ratio", "slack"};
    double worst = std::numeric_limits<double>::infinity();
    for (auto& r : rows) {
      worst = std::min(worst, r[5].is_number() ? r[5].get<double>() : -std::numeric_limits<double>::infinity());
      out.rows.push_back(std::move(r));
    }
    out.result["loss"] = report::num(bound_constants().separation_loss);
    out.result["worst_slack"] = report::num(worst);
  };
}

inline Job prepare_certify(Section& root, Section p, Context& c, std::optional<BeltramiField> field,
                           std::optional<NamedMap> map) {
  const std::string kind = p.text(
      "kind", "point",
      {"point", "disk_point", "lipschitz", "holder", "infinity", "carleson", "extension", "exponent"});

  if (kind == "extension" || kind == "exponent") {
    if (!map) root.fail("map", "is required for certify kind '" + kind + "'");
    if (field) root.fail("field", "is not used by certify kind '" + kind + "'");
    const NamedMap f = *map;
    if (kind == "extension") {
      const Complex pt = p.point("point", f.domain == Domain::UnitDisk ? Complex(1.0, 0.0) : Complex(0.0, 0.0));
      const double R = p.number("R", 0.5);
      ExtensionOptions eo;
      eo.resolution = static_cast<std::size_t>(p.integer("resolution", 64, 8, 8192));
      eo.slope_diverge = p.number("slope_diverge", eo.slope_diverge);
      eo.slope_bounded = p.number("slope_bounded", eo.slope_bounded);
      eo.threads = c.opt->threads;
      const auto sched = read_schedule(p, "schedule", geometric_schedule(R, 10));
      p.done();
      return [f, pt, R, sched, eo](Output& out) {
        const ExtensionCheck e = extension_divergence_check(f, pt, R, sched, eo);
        out.result = report::to_json(e);
        for (const auto& w : e.warnings) out.warn(w);
      };
    }
    const Complex pt = p.point("point", f.domain == Domain::UnitDisk ? Complex(1.0, 0.0) : Complex(0.0, 0.0));
    const double thr = p.number("fit_threshold", 0.05);
    const auto sched = read_schedule(p, "schedule", geometric_schedule(1.0, 17, 0.5, 4));
    p.done();
    return [f, pt, sched, thr](Output& out) {
      const BoundaryExponent b = empirical_boundary_exponent(f, pt, sched, thr);
      out.result = report::to_json(b);
      if (b.poor_fit) out.warn("PoorFit: log-log residual above threshold");
    };
  }

  // point certificates may take the map itself: μ is its closed form and
  // the boundary increments supply f'(t)
  std::optional<NamedMap> joined;
  if (map) {
    if (kind != "point" && kind != "disk_point") root.fail("map", "is not used by certify kind '" + kind + "'");
    if (field) root.fail("field", "give either a map or a field");
    if (!map->mu_closed_form) root.fail("map", "has no closed-form coefficient");
    field = map->field();
    if (map->boundary) joined = map;
  }
  require_field(field ? &*field : nullptr, root);
  const BeltramiField f = *field;

  if (kind == "carleson") {
    ProbeOptions probe{1e-4, 10.0};
    probe.cauchy_tol = p.number("cauchy_tol", probe.cauchy_tol);
    probe.diverge_threshold = p.number("diverge_threshold", probe.diverge_threshold);
    EtaOptions eta;
    eta.per_decade = static_cast<int>(p.integer("per_decade", eta.per_decade, 16, 1 << 20));
    eta.nx = static_cast<int>(p.integer("nx", eta.nx, 1, 1 << 16));
    const auto sched = read_schedule(p, "schedule", geometric_schedule(1.0, 24));
    p.done();
    return [f, sched, probe, eta](Output& out) {
      out.result = report::to_json(carleson_certify(f, sched, probe, eta));
    };
  }

  CertifyOptions co;
  co.quad = read_quad(p, c, 1e-6);
  co.probe.cauchy_tol = p.number("cauchy_tol", co.probe.cauchy_tol);
  co.probe.diverge_threshold = p.number("diverge_threshold", co.probe.diverge_threshold);
  co.schedule_count = static_cast<int>(p.integer("schedule_count", co.schedule_count, 4, 200));

  Job run;
  if (kind == "point") {
    const double t = p.number("t", 0.0);
    const double R0 = p.number("R0", 1.0);
    const auto sched = read_schedule(p, "schedule", geometric_schedule(R0, co.schedule_count));
    run = [f, t, R0, sched, co, joined](Output& out) {
      RegularityCertificate cert = certify_point(f, t, R0, sched, co);
      std::optional<BoundaryExponent> b;
      if (joined) b = attach_boundary_exponent(cert, *joined);
      out.result = report::to_json(cert);
      if (b) out.result["boundary_exponent"] = report::to_json(*b);
    };
  } else if (kind == "disk_point") {
    const Complex zeta = p.point("zeta", Complex(1.0, 0.0));
    const double R0 = p.number("R0", 1.0);
    const auto sched = read_schedule(p, "schedule", geometric_schedule(R0, co.schedule_count));
    run = [f, zeta, R0, sched, co, joined](Output& out) {
      RegularityCertificate cert = certify_disk_point(f, zeta, R0, sched, co);
      std::optional<BoundaryExponent> b;
      if (joined) b = attach_boundary_exponent(cert, *joined);
      out.result = report::to_json(cert);
      if (b) out.result["boundary_exponent"] = report::to_json(*b);
    };
  } else if (kind == "lipschitz" || kind == "holder") {
    const auto I = p.interval("interval", std::pair<double, double>{0.0, 0.0});
    const double R = p.number("R", 1.0);
    co.t_grid_points = static_cast<int>(p.integer("t_grid_points", co.t_grid_points, 1, 100000));
    const auto sched = read_schedule(p, "schedule", geometric_schedule(R, co.schedule_count));
    if (kind == "lipschitz") {
      co.lipschitz_cap = p.number("M_cap", co.lipschitz_cap);
      run = [f, I, R, sched, co](Output& out) {
        out.result = report::to_json(certify_lipschitz(f, I, R, co.lipschitz_cap, sched, co));
      };
    } else {
      run = [f, I, R, sched, co](Output& out) {
        out.result = report::to_json(certify_holder(f, I, R, sched, co));
      };
    }
  } else {  // infinity
    const double r0 = p.number("r0", 1.0);
    std::vector<double> def;
    for (int k = 1; k <= 12; ++k) def.push_back(std::exp(static_cast<double>(k)));
    const auto sched = read_schedule(p, "schedule", def);
    run = [f, r0, sched, co](Output& out) {
      out.result = report::to_json(certify_infinity(f, r0, sched, co));
    };
  }
  p.done();
  return [run, &c](Output& out) {
    run(out);
    Json input = Json::object();
    for (const char* k : {"field", "map"})
      if (c.effective.contains(k)) input[k] = c.effective[k];
    input["params"] = c.effective["params"];
    out.result["input"] = input;
    for (const auto& w : out.result["warnings"]) out.warn(w.get<std::string>());
  };
}

inline Job prepare_gallery(Section& root, Section p, Context&, std::optional<BeltramiField> field,
                           std::optional<NamedMap> map) {
  const std::string action = p.text("action", "list", {"list", "eval"});
  if (action == "list") {
    p.done();
    if (field || map) root.fail("map", "'list' takes neither field nor map");
    return [](Output& out) {
      out.columns = {"name", "kind", "domain", "params", "description"};
      for (const auto& e : gallery_catalog()) {
        std::string ps;
        for (const auto& s : e.params) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", s.default_value);
          ps += (ps.empty() ? "" : " ") + s.name + "=" + buf;
        }
        out.rows.push_back({e.name, e.is_map ? "map" : "field", e.domain, ps, e.description});
      }
    };
  }
  const auto pts = p.points("points");
  const double h = p.number("h", 1e-5);
  p.done();
  if (map) {
    if (field) root.fail("field", "give either a map or a field");
    return [f = *map, pts, h](Output& out) {
      out.columns = {"x", "y", "f_re", "f_im", "mu_re", "mu_im", "mu_fd_re", "mu_fd_im"};
      for (Complex z : pts) {
        if (!in_domain(f.domain, z)) throw DomainError("evaluation point outside the map's domain");
        const Complex w = f(z);
        std::vector<Json> row = {z.real(), z.imag(), report::num(w.real()), report::num(w.imag())};
        if (f.mu_closed_form) {
          const Complex mu = (*f.mu_closed_form)(z);
          row.push_back(report::num(mu.real()));
          row.push_back(report::num(mu.imag()));
        } else {
          row.insert(row.end(), {nullptr, nullptr});
        }
        try {
          const Complex fd = wirtinger_check(f, z, h).mu_fd;
          row.push_back(report::num(fd.real()));
          row.push_back(report::num(fd.imag()));
        } catch (const StencilOutOfDomain&) {
          row.insert(row.end(), {nullptr, nullptr});
          out.warn("finite-difference stencil left the domain at one or more points");
        }
        out.rows.push_back(std::move(row));
      }
    };
  }
  require_field(field ? &*field : nullptr, root);
  return [f = *field, pts](Output& out) {
    out.columns = {"x", "y", "mu_re", "mu_im", "clipped"};
    for (Complex z : pts) {
      if (!f.contains(z)) throw DomainError("evaluation point outside the field's domain");
      const MuSample s = f.evaluate(z);
      out.rows.push_back({z.real(), z.imag(), s.value.real(), s.value.imag(), s.clipped});
    }
  };
}

inline Job prepare_sweep(Section& root, Section p, Context& c, std::optional<BeltramiField> field) {
  require_field(field ? &*field : nullptr, root);
  std::vector<std::string> quantities = {"Q", "Q_neg", "omega"};
  for (KernelKind k : all_kernels)
    if (!is_disk_kernel(k)) quantities.push_back(to_string(k));
  const std::string quantity = p.text("quantity", "Q", quantities);
  const auto ts = p.numbers("t", {0.0});
  const double R = p.number("R", 1.0);
  const auto rs = p.numbers("r", geometric_schedule(R, 12));
  const QuadOptions q = read_quad(p, c, 1e-8);
  p.done();
  if (ts.empty() || rs.empty()) p.fail("r", "and 't' must be non-empty");
  if (field->domain() != Domain::UpperHalfPlane) throw DomainMismatch("sweep needs a half-plane field");
  for (double r : rs)
    if (!(r > 0.0) || (quantity != "omega" && !(r < R))) p.fail("r", "entries must lie in (0, R)");
  return [f = *field, quantity, ts, rs, R, q](Output& out) {
    out.columns = {"t", "r", "value", "abs_error_estimate", "converged"};
    const BeltramiField neg = f.negated();
    for (double t : ts)
      for (double r : rs) {
        QuadratureResult v;
        if (quantity == "Q") v = q_modulus_ratio(f, t, r, R, q);
        else if (quantity == "Q_neg") v = q_modulus_ratio(neg, t, r, R, q);
        else if (quantity == "omega") v = holder_mean(f, t, r, q);
        else v = annulus_integral(f, SemiannulusSpec::half_plane(t, r, R), kernel_from_string(quantity), q);
        note_quadrature(out, v, quantity);
        out.rows.push_back({t, r, report::num(v.value), report::num(v.abs_error_estimate), v.converged});
      }
    out.result["R"] = R;
  };
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

/// Flattens the traces of a certificate-like result into rows.
inline void traces_as_rows(Output& out) {
  if (!out.columns.empty()) return;
  out.columns = {"trace", "parameter", "value"};
  auto add = [&](const std::string& name, const Json& pts) {
    for (const auto& p : pts) out.rows.push_back({name, p[0], p[1]});
  };
  if (out.result.contains("traces"))
    for (const auto& t : out.result["traces"]) add(t["name"].get<std::string>(), t["points"]);
  if (out.result.contains("verdicts"))
    for (const auto& v : out.result["verdicts"])
      if (v.contains("limit")) add(v["condition"].get<std::string>() + ":limit", v["limit"]["trace"]);
  if (out.result.contains("verdict")) add("verdict", out.result["verdict"]["trace"]);
  if (out.result.contains("trace") && out.result["trace"].is_array()) add("limit", out.result["trace"]);
}

inline std::string render(const Context& c, Output& out, const std::string& status, const std::string& error) {
  if (c.format == "csv") {
    std::ostringstream os;
    os << "# tool: " << tool_name << " " << tool_version << "\n";
    os << "# config: " << c.effective.dump() << "\n";
    os << "# status: " << status << "\n";
    if (!error.empty()) os << "# error: " << error << "\n";
    for (const auto& w : out.warnings) os << "# warning: " << w << "\n";
    Json summary = out.result;
    for (const char* k : {"input", "grids", "traces", "verdicts", "verdict", "trace", "warnings"}) summary.erase(k);
    if (!summary.empty()) os << "# result: " << summary.dump() << "\n";
    traces_as_rows(out);
    for (std::size_t k = 0; k < out.columns.size(); ++k) os << (k ? "," : "") << out.columns[k];
    os << "\n";
    for (const auto& row : out.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_cell(row[k]);
      os << "\n";
    }
    return os.str();
  }
  Json doc = {{"tool", {{"name", tool_name}, {"version", tool_version}}}, {"config", c.effective},
              {"status", status}};
  if (!error.empty()) doc["error"] = error;
  Json result = out.result;
  if (!out.columns.empty()) {
    Json rows = Json::array();
    for (const auto& row : out.rows) {
      Json o = Json::object();
      for (std::size_t k = 0; k < out.columns.size() && k < row.size(); ++k) o[out.columns[k]] = row[k];
      rows.push_back(std::move(o));
    }
    result["rows"] = std::move(rows);
  }
  doc["result"] = std::move(result);
  doc["warnings"] = out.warnings;
  return doc.dump(2) + "\n";
}

}  // namespace scenario

/// Validates and executes one scenario document.
inline RunResult run_scenario(const Json& doc, const RunOptions& opt = {}) {
  using namespace scenario;
  RunResult res;
  Context ctx;
  ctx.opt = &opt;
  Job job;
  try {
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    for (const auto& [k, v] : doc.items())
      if (!std::set<std::string>{"schema", "task", "seed", "field", "map", "params", "output"}.count(k))
        throw ScenarioError("unknown key '" + k + "'");
    Section root(&doc, &ctx.effective, Json::json_pointer(), "");
    root.text("schema", std::string(scenario_schema), {scenario_schema});
    const std::string task =
        root.text("task", std::nullopt,
                  {"dilatation", "integrate", "modulus", "bounds-fuzz", "certify", "gallery", "sweep"});
    const auto seed = root.integer("seed", 0, 0, std::numeric_limits<long long>::max());
    ctx.seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(seed);
    ctx.effective["seed"] = ctx.seed;
    std::optional<BeltramiField> field;
    std::optional<NamedMap> map;
    if (root.has("field")) field = read_field(root.child("field"), opt);
    if (root.has("map")) map = read_map(root.child("map"));
    if (task == "bounds-fuzz" && (field || map)) root.fail("field", "and 'map' are not used by bounds-fuzz");
    Section params = root.child("params");
    if (task == "dilatation") job = prepare_dilatation(root, params, ctx, field);
    else if (task == "integrate") job = prepare_integrate(root, params, ctx, field);
    else if (task == "modulus") job = prepare_modulus(root, params, ctx, field, map);
    else if (task == "bounds-fuzz") job = prepare_bounds_fuzz(root, params, ctx);
    else if (task == "certify") job = prepare_certify(root, params, ctx, field, map);
    else if (task == "gallery") job = prepare_gallery(root, params, ctx, field, map);
    else job = prepare_sweep(root, params, ctx, field);

    Section output = root.child("output");
    ctx.format = output.text("format", "json", {"json", "csv"});
    if (opt.format) {
      if (*opt.format != "json" && *opt.format != "csv") throw ScenarioError("--format must be json or csv");
      ctx.format = *opt.format;
      ctx.effective["output"]["format"] = ctx.format;
    }
    if (output.has("path")) {
      const std::string path = resolve(opt, output.text("path"));
      ctx.out_path = path;
    }
    if (opt.out_path) ctx.out_path = opt.out_path;
    output.done();
    root.done();
    // the destination does not influence the artifact's bytes
    ctx.effective["output"].erase("path");
    Json ordered = Json::object();
    for (const char* k : {"schema", "task", "seed", "field", "map", "params", "output"})
      if (ctx.effective.contains(k)) ordered[k] = ctx.effective[k];
    ctx.effective = std::move(ordered);
  } catch (const std::exception& e) {
    res.exit_code = ExitValidation;
    res.message = e.what();
    return res;
  }
  res.format = ctx.format;
  res.out_path = ctx.out_path;

  Output out;
  try {
    job(out);
    res.artifact = render(ctx, out, "ok", "");
  } catch (const std::exception& e) {
    const bool numerical = is_numerical_failure(e);
    res.exit_code = numerical ? ExitNumerical : ExitValidation;
    res.message = e.what();
    out.warn(e.what());
    res.artifact = render(ctx, out, numerical ? "numerical_failure" : "validation_error", e.what());
  }
  return res;
}

inline RunResult run_scenario_text(const std::string& text, const RunOptions& opt = {}) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    RunResult r;
    r.exit_code = ExitValidation;
    r.message = std::string("scenario is not valid JSON: ") + e.what();
    return r;
  }
  return run_scenario(doc, opt);
}

}  // namespace qcb
