#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cvf/cli.hpp"

using cvf::cli::Json;

namespace {

const std::string kManifests = CVF_MANIFEST_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cvf");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::ostringstream out, err;
  const int code = cvf::cli::main_entry(static_cast<int>(args.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("cvf_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(CliRun, RotationPlane) {
  const Outcome o = invoke({"run", kManifests + "/rotation_plane.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const Json r = Json::parse(o.out);
  EXPECT_EQ(r["status"], "pass");
  EXPECT_EQ(r["analyses"]["check-conformal"]["conformal"], true);
  ASSERT_EQ(r["analyses"]["zeros"]["count"], 1);
  const Json& z = r["analyses"]["classify"]["zeros"][0];
  EXPECT_EQ(z["verdict"], "killing_inessential");
  EXPECT_LT(std::abs(z["point"][0].get<double>()) + std::abs(z["point"][1].get<double>()), 1e-9);
}

TEST(CliRun, RemarkSphereAllAnalyses) {
  const Outcome o = invoke({"run", kManifests + "/remark_sphere.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const Json r = Json::parse(o.out);
  EXPECT_EQ(r["status"], "pass");
  const Json& a = r["analyses"];
  for (const char* name : {"check-conformal", "zeros", "classify", "verify-identities", "trace", "umbilicity"})
    EXPECT_EQ(a[name]["status"], "pass") << name;
  bool essential_origin = false;
  for (const Json& z : a["classify"]["zeros"]) {
    double n = 0;
    for (const Json& c : z["point"]) n += c.get<double>() * c.get<double>();
    if (n < 1e-18 && z["verdict"] == "essential") essential_origin = true;
  }
  EXPECT_TRUE(essential_origin);
}

TEST(CliRun, NonConformalFieldFails) {
  const Outcome o = invoke({"run", kManifests + "/nonconformal.json"});
  EXPECT_EQ(o.code, 1);
  const Json r = Json::parse(o.out);
  EXPECT_EQ(r["status"], "fail");
  EXPECT_EQ(r["analyses"]["check-conformal"]["status"], "fail");
  EXPECT_GT(r["analyses"]["check-conformal"]["max_residual"].get<double>(), 1e-7);
}

TEST(CliRun, OutFileAndOverrides) {
  const auto path = (std::filesystem::temp_directory_path() / "cvf_test_out.json").string();
  const Outcome o = invoke({"run", kManifests + "/rotation_plane.json", "--out", path, "--seed", "5", "--zero-tol",
                            "1e-10"});
  ASSERT_EQ(o.code, 0) << o.err;
  std::ifstream in(path);
  const Json r = Json::parse(in);
  EXPECT_EQ(r["settings"]["seed"], 5);
  EXPECT_EQ(r["settings"]["tolerances"]["zero"], 1e-10);
}

TEST(CliDeterminism, ByteIdenticalReports) {
  for (const char* m : {"rotation_plane.json", "remark_sphere.json", "nonconformal.json", "great_circle.json",
                        "inline_axis_rotation.json"}) {
    const Outcome a = invoke({"run", kManifests + "/" + m});
    const Outcome b = invoke({"run", kManifests + "/" + m});
    EXPECT_EQ(a.code, b.code) << m;
    EXPECT_EQ(a.out, b.out) << m;
  }
  const Outcome s1 = invoke({"run", kManifests + "/great_circle.json", "--seed", "11"});
  const Outcome s2 = invoke({"run", kManifests + "/great_circle.json", "--seed", "12"});
  EXPECT_NE(s1.out, s2.out);
}

TEST(CliExitCodes, ManifestErrors) {
  EXPECT_EQ(invoke({"run", "/nonexistent/manifest.json"}).code, 2);
  EXPECT_EQ(invoke({"run", temp_file("syntax.json", "{\"chart\": ")}).code, 2);
  EXPECT_EQ(invoke({"run", temp_file("nofield.json", R"({"chart": {"builtin": "euclidean", "dim": 2},
      "analyses": ["zeros"]})")}).code,
            2);
  EXPECT_EQ(invoke({"run", temp_file("noanalyses.json", R"({"chart": {"builtin": "euclidean", "dim": 2},
      "field": {"builtin": "euler"}, "analyses": []})")}).code,
            2);
  EXPECT_EQ(invoke({"run", temp_file("badanalysis.json", R"({"chart": {"builtin": "euclidean", "dim": 2},
      "field": {"builtin": "euler"}, "analyses": ["plot"]})")}).code,
            2);
  const Outcome bad_expr = invoke({"run", temp_file("badexpr.json", R"({"chart": {"builtin": "euclidean", "dim": 2},
      "field": {"components": ["x1 + * x2", "0"]}, "analyses": ["zeros"]})")});
  EXPECT_EQ(bad_expr.code, 2);
  EXPECT_FALSE(bad_expr.err.empty());
}

TEST(CliExitCodes, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"run"}).code, 2);
  EXPECT_EQ(invoke({"run", kManifests + "/rotation_plane.json", "--geo-steps", "many"}).code, 2);
}

TEST(CliExitCodes, RuntimeAnalysisErrorNamesTheAnalysis) {
  // The inline metric degenerates on x1 <= 0, inside the declared domain.
  const Outcome o = invoke({"run", temp_file("runtime.json", R"({"chart": {"dim": 2,
      "metric": [["1", "0"], ["0", "x1"]], "domain": {"lower": [-1, -1], "upper": [1, 1]}},
      "field": {"builtin": "euler"}, "analyses": ["zeros", "check-conformal"]})")});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("check-conformal"), std::string::npos) << o.err;
}

TEST(CliExitCodes, UnclassifiableZeroIsAFailureNotACrash) {
  // Dimension two refuses strictly conformal fields; the zero is kept with its error.
  const Outcome o = invoke({"run", temp_file("plane_euler.json", R"({"chart": {"builtin": "euclidean", "dim": 2},
      "field": {"builtin": "euler"}, "analyses": ["zeros", "classify"]})")});
  EXPECT_EQ(o.code, 1);
  const Json r = Json::parse(o.out);
  const Json& z = r["analyses"]["classify"]["zeros"][0];
  EXPECT_TRUE(z.contains("error"));
  ASSERT_EQ(z["point"].size(), 2u);
  EXPECT_EQ(r["status"], "fail");
}

TEST(CliSchema, NonEmptyAndDescribesBothDocuments) {
  const Outcome o = invoke({"schema"});
  ASSERT_EQ(o.code, 0);
  ASSERT_FALSE(o.out.empty());
  const Json s = Json::parse(o.out);
  EXPECT_TRUE(s["$defs"].contains("manifest"));
  EXPECT_TRUE(s["$defs"].contains("report"));
  EXPECT_NE(o.out.find("mt19937_64"), std::string::npos);
}

TEST(CliCatalog, ListsBuiltins) {
  const Outcome o = invoke({"catalog"});
  ASSERT_EQ(o.code, 0);
  const Json c = Json::parse(o.out);
  EXPECT_NE(c.dump().find("sphere_stereographic"), std::string::npos);
  EXPECT_NE(c.dump().find("remark_example"), std::string::npos);
  EXPECT_NE(c.dump().find("special_conformal"), std::string::npos);
}

TEST(CliDump, SeventeenDigitsAndNullForNonFinite) {
  Json d = Json::object();
  d["a"] = 0.1;
  d["b"] = std::numeric_limits<double>::infinity();
  const std::string text = cvf::cli::dump(d);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos) << text;
  EXPECT_NE(text.find("null"), std::string::npos) << text;
}
