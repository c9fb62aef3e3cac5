#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace qcb;

namespace {

Json parse_artifact(const RunResult& r) { return Json::parse(r.artifact); }

RunResult run(const std::string& text, RunOptions o = {}) { return run_scenario_text(text, o); }

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("qcb_test_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

// --- encoders ----------------------------------------------------------------

TEST(Report, NonFiniteBecomesNull) {
  EXPECT_TRUE(report::num(NAN).is_null());
  EXPECT_TRUE(report::num(INFINITY).is_null());
  EXPECT_EQ(report::num(1.5), Json(1.5));
  EXPECT_EQ(report::complex({1, -2}).dump(), "[1.0,-2.0]");
}

TEST(Report, VerdictValueOnlyWhenConverged) {
  LimitVerdict v;
  v.trace = {{0.5, 1.0}};
  v.status = LimitStatus::Diverges;
  v.value = 3.0;
  EXPECT_FALSE(report::to_json(v).contains("value"));
  v.status = LimitStatus::ConvergesTo;
  EXPECT_EQ(report::to_json(v)["value"], Json(3.0));
  EXPECT_EQ(report::to_json(v)["trace"].dump(), "[[0.5,1.0]]");
}

TEST(Report, CertificateDocumentShape) {
  const auto cert = certify_point(make_field("tanh_strip"), 0.0, 0.9);
  const Json j = report::to_json(cert, {{"field", "tanh_strip"}});
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema", "input", "grids", "verdicts", "traces", "constants",
                                            "conclusion", "warnings"}));
  EXPECT_EQ(j["schema"], "qcb-certificate/1");
  EXPECT_EQ(j["conclusion"], "Differentiable");
  EXPECT_EQ(j["grids"]["subject"], "point");
  EXPECT_EQ(j["grids"]["schedule"].size(), 24u);
  EXPECT_EQ(j["verdicts"][0]["condition"], "Cond1");
  EXPECT_EQ(j["verdicts"][0]["limit"]["status"], "ConvergesTo");
  EXPECT_DOUBLE_EQ(j["constants"]["C_disk"].get<double>(), 4 * std::exp(pi / 2));
  EXPECT_DOUBLE_EQ(j["constants"]["separation_loss"].get<double>(), pi);
  EXPECT_TRUE(j["constants"].contains("max_clipped_fraction"));
}

TEST(Report, ModulusAndSpecEncoding) {
  const auto e = discrete_modulus(rectangle_mesh(2, pi, 8, 8));
  const Json j = report::to_json(e);
  EXPECT_NEAR(j["value"].get<double>(), 2.0, 1e-9);
  EXPECT_EQ(j.size(), 8u);
  const Json s = report::to_json(SemiannulusSpec::disk({0, 1}, 0.2, 0.8).with_sector(0.1, 1.0));
  EXPECT_EQ(s.dump(), R"({"kind":"disk","zeta":[0.0,1.0],"r1":0.2,"r2":0.8,"sector":[0.1,1.0]})");
}

// --- sampled grids -------------------------------------------------------------

TEST(SampledGrid, ParseAndNearestLookup) {
  std::istringstream in(
      "# comment\nx,y,re,im\n0,0.5,0.1,0\n1,0.5,0.2,0\n0,1.5,0.3,0\n1,1.5,0.4,0.1\n");
  const auto g = SampledGrid::parse(in);
  EXPECT_EQ(g.nx(), 2u);
  EXPECT_EQ(g.ny(), 2u);
  EXPECT_EQ(g(Complex(0.1, 0.6)), Complex(0.1, 0));
  EXPECT_EQ(g(Complex(0.9, 1.4)), Complex(0.4, 0.1));
  EXPECT_EQ(g(Complex(0.5, 1.0)), Complex(0.4, 0.1));  // ties go to the upper node
  EXPECT_EQ(g(Complex(-9, 9)), Complex(0.3, 0));       // clamped
  const auto f = g.field(Domain::UpperHalfPlane, "grid:test");
  EXPECT_EQ(f(Complex(1, 0.5)), Complex(0.2, 0));
  EXPECT_EQ(f.label(), "grid:test");
}

TEST(SampledGrid, FormatErrors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return SampledGrid::parse(in);
  };
  EXPECT_THROW(parse(""), FormatError);
  EXPECT_THROW(parse("0,0,0,0\n0,0,0.1,0\n"), FormatError);         // duplicate
  EXPECT_THROW(parse("0,0,0,0\n1,0,0,0\n0,1,0,0\n"), FormatError);  // missing corner
  EXPECT_THROW(parse("0,0,0,0\nbad line\n"), FormatError);
  EXPECT_THROW(SampledGrid::load("/nonexistent/grid.csv"), FormatError);
}

TEST(SampledGrid, ScenarioFieldFromFile) {
  std::string body = "x,y,re,im\n";
  for (int i = 0; i <= 20; ++i)
    for (int j = 1; j <= 20; ++j) body += std::to_string(-1 + 0.1 * i) + "," + std::to_string(0.1 * j) + ",0.25,0\n";
  const auto path = temp_file("grid.csv", body);
  RunOptions o;
  o.base_dir = path.parent_path();
  const auto r = run(R"({"task":"dilatation","field":{"grid":")" + path.filename().string() +
                         R"("},"params":{"points":[[0.3,0.4]]}})",
                     o);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const Json a = parse_artifact(r);
  EXPECT_EQ(a["config"]["field"]["domain"], "upper_half_plane");
  EXPECT_DOUBLE_EQ(a["result"]["rows"][0]["mu_re"].get<double>(), 0.25);
  const auto missing = run(R"({"task":"dilatation","field":{"grid":"/nonexistent.csv"},"params":{"points":[[0,1]]}})");
  EXPECT_EQ(missing.exit_code, 2);
}

// --- scenario validation ---------------------------------------------------------

TEST(Scenario, ValidationFailuresExitTwoWithoutArtifact) {
  const std::vector<std::pair<std::string, std::string>> bad = {
      {"not json", "not valid JSON"},
      {"[1,2]", "must be a JSON object"},
      {R"({"task":"modulus","bogus":1})", "unknown key 'bogus'"},
      {R"({"field":{"name":"zero"}})", "task"},
      {R"({"task":"explode"})", "task"},
      {R"({"schema":"qcb-scenario/9","task":"gallery"})", "schema"},
      {R"({"task":"dilatation","field":{"name":"zero"},"params":{"points":[[0,1]],"extra":2}})",
       "unknown key 'params.extra'"},
      {R"({"task":"dilatation","field":{"name":"nope"},"params":{"points":[[0,1]]}})", "nope"},
      {R"({"task":"dilatation","field":{"name":"zero","bad":1},"params":{"points":[[0,1]]}})", "field.bad"},
      {R"({"task":"dilatation","field":{"name":"zero"},"params":{"points":"x"}})", "points"},
      {R"({"task":"modulus","params":{"region":{"kind":"half_plane","r":1,"R":2},"n":2}})", "n"},
      {R"({"task":"modulus","params":{"region":{"kind":"half_plane","r":2,"R":1}}})", ""},
      {R"({"task":"certify","field":{"name":"zero"},"params":{"kind":"nope"}})", "kind"},
      {R"({"task":"certify","map":{"name":"shear"},"params":{"kind":"lipschitz"}})", "map"},
      {R"({"task":"bounds-fuzz","field":{"name":"zero"}})", "bounds-fuzz"},
      {R"({"task":"gallery","output":{"format":"xml"}})", "format"},
      {R"({"task":"gallery","seed":-1})", "seed"},
  };
  for (const auto& [text, needle] : bad) {
    const auto r = run(text);
    EXPECT_EQ(r.exit_code, 2) << text;
    EXPECT_TRUE(r.artifact.empty()) << text;
    EXPECT_NE(r.message.find(needle), std::string::npos) << text << " -> " << r.message;
  }
}

TEST(Scenario, NumericalFailureExitsThreeWithPartialArtifact) {
  const auto r = run(R"({"task":"modulus","params":{"region":{"kind":"disk","r1":0.2,"r2":0.8},
                         "n":32,"max_iterations":2}})");
  EXPECT_EQ(r.exit_code, 3);
  const Json a = parse_artifact(r);
  EXPECT_EQ(a["status"], "numerical_failure");
  EXPECT_NE(a["error"].get<std::string>().find("SolveFailure"), std::string::npos);
  EXPECT_EQ(a["result"]["region"]["kind"], "disk");  // written before the solve failed
  EXPECT_FALSE(a["warnings"].empty());
  EXPECT_TRUE(is_numerical_failure(DegenerateCell("x")));
  EXPECT_TRUE(is_numerical_failure(std::bad_alloc()));
  EXPECT_FALSE(is_numerical_failure(BadParams("x")));
}

TEST(Scenario, RuntimeValidationErrorKeepsArtifact) {
  // the twist has no boundary function; this is only found when running
  const auto r = run(R"({"task":"certify","map":{"name":"radial_twist"},"params":{"kind":"exponent"}})");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(parse_artifact(r)["status"], "validation_error");
}

TEST(Scenario, EffectiveConfigMaterializesDefaults) {
  const auto r = run(R"({"task":"certify","field":{"name":"radial_stretch"},"params":{"kind":"holder"}})");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const Json a = parse_artifact(r);
  const Json& c = a["config"];
  EXPECT_EQ(c["schema"], "qcb-scenario/1");
  EXPECT_EQ(c["seed"], 0);
  EXPECT_EQ(c["field"]["params"]["K"], 2.0);
  EXPECT_EQ(c["field"]["params"]["disk"], 0.0);
  EXPECT_EQ(c["params"]["R"], 1.0);
  EXPECT_EQ(c["params"]["schedule"].size(), 24u);
  EXPECT_EQ(c["params"]["t_grid_points"], 33);
  EXPECT_EQ(c["output"]["format"], "json");
  EXPECT_EQ(a["tool"]["name"], "qcb");
  EXPECT_EQ(a["tool"]["version"], "0.1.0");
  EXPECT_EQ(a["result"]["schema"], "qcb-certificate/1");
  EXPECT_EQ(a["result"]["input"]["field"]["name"], "radial_stretch");
  EXPECT_EQ(a["result"]["conclusion"], "Holder");
}

// Feeding the echoed configuration back in reproduces the artifact exactly.
TEST(Scenario, EchoedConfigReproducesArtifact) {
  const std::vector<std::string> docs = {
      R"({"task":"dilatation","field":{"name":"shear"},"params":{"points":[[0.1,0.05],[2,3]]}})",
      R"({"task":"integrate","field":{"name":"radial_stretch","params":{"K":3}},
          "params":{"region":{"r":0.1,"R":1}}})",
      R"({"task":"modulus","params":{"region":{"kind":"disk","zeta":[0,1],"r1":0.3,"r2":3},"n":24}})",
      R"({"task":"bounds-fuzz","seed":5,"params":{"count":3,"mesh_n":16,"resolution":256}})",
      R"({"task":"gallery","params":{"action":"list"}})",
      R"({"task":"sweep","field":{"name":"radial_stretch"},"params":{"quantity":"Q","t":[0,0.5]}})",
      R"({"task":"certify","field":{"name":"shear"},"params":{"kind":"carleson"}})",
  };
  for (const auto& d : docs) {
    const auto first = run(d);
    ASSERT_EQ(first.exit_code, 0) << d << ": " << first.message;
    const Json cfg = parse_artifact(first)["config"];
    const auto second = run_scenario(cfg);
    ASSERT_EQ(second.exit_code, 0) << cfg.dump();
    EXPECT_EQ(first.artifact, second.artifact) << d;
  }
}

TEST(Scenario, OverridesAndThreadIndependence) {
  const std::string doc = R"({"task":"bounds-fuzz","seed":5,"params":{"count":4,"mesh_n":16,"resolution":256}})";
  RunOptions a, b;
  b.threads = 3;
  EXPECT_EQ(run(doc, a).artifact, run(doc, b).artifact);
  RunOptions s;
  s.seed = 9;
  const Json j = parse_artifact(run(doc, s));
  EXPECT_EQ(j["config"]["seed"], 9);
  EXPECT_NE(run(doc, s).artifact, run(doc, a).artifact);

  RunOptions t;
  t.tol = 1e-6;
  const auto m = run(R"({"task":"modulus","params":{"region":{"r":1,"R":3},"n":16}})", t);
  EXPECT_EQ(parse_artifact(m)["config"]["params"]["tol"], 1e-6);
  RunOptions f;
  f.format = "csv";
  EXPECT_EQ(run(R"({"task":"gallery"})", f).artifact.rfind("# tool: qcb 0.1.0\n", 0), 0u);
  RunOptions bad;
  bad.format = "xml";
  EXPECT_EQ(run(R"({"task":"gallery"})", bad).exit_code, 2);
}

TEST(Scenario, CsvLayout) {
  const auto r = run(R"({"task":"dilatation","field":{"name":"constant","params":{"re":0.5}},
                         "params":{"points":[[0,1],[1,1]]},"output":{"format":"csv"}})");
  ASSERT_EQ(r.exit_code, 0);
  std::istringstream in(r.artifact);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_GE(lines.size(), 6u);
  EXPECT_EQ(lines[0], "# tool: qcb 0.1.0");
  EXPECT_EQ(lines[1].rfind("# config: {", 0), 0u);
  EXPECT_EQ(Json::parse(lines[1].substr(10))["task"], "dilatation");
  EXPECT_EQ(lines[2], "# status: ok");
  EXPECT_EQ(lines[lines.size() - 3], "x,y,z0_x,z0_y,mu_re,mu_im,K,D,D_neg,clipped");
  EXPECT_EQ(lines.back().rfind("1,1,", 0), 0u);
  // %.17g round-trips doubles
  const std::string last = lines.back();
  std::vector<std::string> cells;
  std::stringstream ls(last);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  EXPECT_EQ(std::stod(cells[4]), 0.5);
}

TEST(Scenario, CertificateTracesFlattenToRowsInCsv) {
  const auto r = run(R"({"task":"certify","field":{"name":"zero"},"params":{"kind":"holder","schedule_count":5},
                         "output":{"format":"csv"}})");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_NE(r.artifact.find("\ntrace,parameter,value\n"), std::string::npos);
  EXPECT_NE(r.artifact.find("# result: "), std::string::npos);
}

TEST(Scenario, WarningsSurfaceInArtifact) {
  // clipping
  const auto c = run(R"({"task":"dilatation","field":{"name":"constant","params":{"re":0.99999},"clip_epsilon":0.01},
                         "params":{"points":[[0,1]]}})");
  ASSERT_EQ(c.exit_code, 0);
  EXPECT_NE(parse_artifact(c)["warnings"].dump().find("clipping"), std::string::npos);
  // poor fit
  const auto p = run(R"({"task":"certify","map":{"name":"tanh_strip"},"params":{"kind":"exponent","fit_threshold":1e-14}})");
  ASSERT_EQ(p.exit_code, 0);
  EXPECT_NE(parse_artifact(p)["warnings"].dump().find("PoorFit"), std::string::npos);
  // failed mesh of the extension check
  const auto q = run(R"({"task":"integrate","field":{"name":"shear"},
                         "params":{"region":{"r":0.001,"R":0.1},"max_cells":64,"kernels":["SquaredModulus"]}})");
  ASSERT_EQ(q.exit_code, 0) << q.message;
  EXPECT_NE(parse_artifact(q)["warnings"].dump().find("ToleranceNotReached"), std::string::npos);
}

TEST(Scenario, CertifyPointJoinsTheMap) {
  const auto r = run(R"({"task":"certify","map":{"name":"tanh_strip"},"params":{"kind":"point","t":0,"R0":0.9}})");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const Json a = parse_artifact(r);
  EXPECT_EQ(a["result"]["conclusion"], "Differentiable");
  EXPECT_NEAR(a["result"]["constants"]["derivative"].get<double>(), pi / 4, 1e-6);
  EXPECT_NEAR(a["result"]["boundary_exponent"]["alpha_hat"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(a["result"]["input"]["map"]["name"], "tanh_strip");
}

TEST(Scenario, MeshFileRoundTrip) {
  std::ostringstream os;
  write_mesh(os, rectangle_mesh(2, pi, 8, 8));
  const auto path = temp_file("mesh.txt", os.str());
  const auto r = run(R"({"task":"modulus","params":{"method":"file","mesh_file":")" + path.string() + R"("}})");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_NEAR(parse_artifact(r)["result"]["estimate"]["value"].get<double>(), 2.0, 1e-9);
  const auto bad = temp_file("bad_mesh.txt", "garbage\n");
  EXPECT_EQ(run(R"({"task":"modulus","params":{"method":"file","mesh_file":")" + bad.string() + R"("}})").exit_code, 2);
}
