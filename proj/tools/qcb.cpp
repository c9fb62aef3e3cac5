// qcb: run a scenario file, or inspect the gallery.
//
//   qcb --scenario s.json [--out a.json] [--format json|csv] [--threads N] [--seed N] [--tol X]
//   qcb gallery list
//   qcb gallery eval --name radial_stretch --param K=2 --point 0.5,0.5

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qcb/qcb.hpp"

namespace {

int emit(const qcb::RunResult& r) {
  if (!r.message.empty()) std::cerr << "qcb: " << r.message << "\n";
  if (r.artifact.empty()) return r.exit_code;
  if (r.out_path) {
    std::ofstream out(*r.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "qcb: cannot write " << *r.out_path << "\n";
      return qcb::ExitValidation;
    }
    out << r.artifact;
  } else {
    std::cout << r.artifact;
  }
  return r.exit_code;
}

// "x,y" -> [x, y]
qcb::Json parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--point", "expected x,y, got '" + s + "'");
  return qcb::Json::array({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical certificates for boundary regularity of quasiconformal maps"};
  app.set_version_flag("--version", std::string(qcb::tool_name) + " " + qcb::tool_version);

  std::string scenario_path, out_path, format;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  double tol = 0.0;
  auto* o_scenario = app.add_option("--scenario", scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
  auto* o_out = app.add_option("--out", out_path, "Artifact path (default: stdout)");
  auto* o_format = app.add_option("--format", format, "Artifact format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 4096u));
  auto* o_seed = app.add_option("--seed", seed, "Overrides the scenario seed");
  auto* o_tol = app.add_option("--tol", tol, "Overrides the task tolerance")->check(CLI::PositiveNumber);

  auto* gallery = app.add_subcommand("gallery", "List or evaluate builtin maps and fields");
  gallery->require_subcommand(1);
  gallery->fallthrough();
  gallery->add_subcommand("list", "Print the catalog")->fallthrough();
  auto* eval = gallery->add_subcommand("eval", "Evaluate a map (f, μ, finite-difference μ) at points");
  std::string name;
  std::vector<std::string> params, points;
  eval->add_option("--name", name, "Gallery name")->required();
  eval->add_option("--param", params, "key=value, repeatable");
  eval->add_option("--point", points, "x,y, repeatable")->required();
  eval->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcb::ExitValidation;
  }

  qcb::RunOptions opt;
  opt.threads = threads;
  if (*o_format) opt.format = format;
  if (*o_seed) opt.seed = seed;
  if (*o_tol) opt.tol = tol;
  if (*o_out) opt.out_path = out_path;

  if (gallery->parsed()) {
    qcb::Json doc = {{"task", "gallery"}};
    if (eval->parsed()) {
      qcb::Json ps = qcb::Json::object();
      qcb::Json pts = qcb::Json::array();
      try {
        for (const auto& kv : params) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value");
          ps[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        for (const auto& p : points) pts.push_back(parse_point(p));
      } catch (const std::exception& e) {
        std::cerr << "qcb: " << e.what() << "\n";
        return qcb::ExitValidation;
      }
      const bool is_map = [&] {
        for (const auto& e : qcb::gallery_catalog())
          if (e.name == name) return e.is_map;
        return name == "identity";
      }();
      doc[is_map ? "map" : "field"] = {{"name", name}, {"params", ps}};
      doc["params"] = {{"action", "eval"}, {"points", pts}};
    } else {
      doc["params"] = {{"action", "list"}};
    }
    return emit(qcb::run_scenario(doc, opt));
  }

  if (!*o_scenario) {
    std::cerr << "qcb: --scenario is required\n" << app.help();
    return qcb::ExitValidation;
  }
  std::ifstream in(scenario_path);
  std::stringstream text;
  text << in.rdbuf();
  opt.base_dir = std::filesystem::path(scenario_path).parent_path();
  return emit(qcb::run_scenario_text(text.str(), opt));
}
