#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catalytic/cli.hpp"
#include "catalytic/report.hpp"
#include "oracles.hpp"

using namespace catalytic;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "catalytic");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("coeffs matches the walk oracle") {
  Outcome o = run_cli({"coeffs", "lp12", "--order", "4"});
  CHECK(o.code == 0);
  const auto walks = oracle::walk_counts({1, -1, 2, -2}, 4);
  std::ostringstream expected;
  expected << "n,M0,M1\n";
  for (int n = 0; n <= 4; ++n) expected << n << "," << walks[n][0] << "," << walks[n][1] << "\n";
  CHECK(o.out == expected.str());
  CHECK(o.out == "n,M0,M1\n0,1,0\n1,0,1\n2,2,1\n3,2,5\n4,11,11\n");
}

TEST_CASE("coeffs as json with exact rationals") {
  Outcome o = run_cli({"coeffs", "maps", "--order", "20", "--format", "json"});
  CHECK(o.code == 0);
  Json j = Json::parse(o.out);
  CHECK(j["schema"] == kReportSchema);
  REQUIRE(j["M0"].size() == 21);
  for (int n = 0; n <= 20; ++n) CHECK(j["M0"][n].get<std::string>() == oracle::rooted_maps(n).get_str());
}

TEST_CASE("analyze emits the report") {
  Outcome o = run_cli({"analyze", "lp12", "--order", "400"});
  CHECK(o.code == 0);
  Json j = Json::parse(o.out);
  CHECK(j["z0"].get<double>() == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(j["alpha"].get<double>() == 0.5);
  CHECK(j["d"] == 1);
  CHECK(j["equation"]["hash"] == canonical_hash(oracle::fixture("lp12")));
  CHECK(j["verdict"] == "Classified");
  Outcome again = run_cli({"analyze", "lp12", "--order", "400"});
  CHECK(again.out == o.out);

  Outcome text = run_cli({"analyze", "lp12", "--order", "100", "--format", "text"});
  CHECK(text.code == 0);
  CHECK(text.out.find("z0 = 0.25") != std::string::npos);
}

TEST_CASE("malformed input") {
  const std::string path = temp_file("catalytic_malformed.json", "{\"k\": 2, \"terms\": [");
  Outcome o = run_cli({"analyze", path});
  CHECK(o.code == 1);
  CHECK(o.out.empty());
  CHECK(o.err.find("error[10] SyntaxError") != std::string::npos);
  std::filesystem::remove(path);

  Outcome missing = run_cli({"analyze", "no_such_fixture"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("IoError") != std::string::npos);

  Outcome flag = run_cli({"analyze", "lp12", "--format", "yaml"});
  CHECK(flag.code == 1);
  Outcome none = run_cli({});
  CHECK(none.code == 1);
  Outcome low = run_cli({"analyze", "lp12", "--order", "10"});
  CHECK(low.code == 1);
  CHECK(low.err.find("SeriesOrderTooLow") != std::string::npos);
}

TEST_CASE("inconclusive analysis exits with 2") {
  const std::string path = temp_file("catalytic_failed.json",
                                     R"({"k": 2, "terms": [{"coef": "1", "a0": 2}, {"coef": "1", "a2": 1}],
                                         "f0_terms": [{"coef": "1"}]})");
  Outcome o = run_cli({"analyze", path, "--order", "60"});
  CHECK(o.code == 2);
  CHECK(Json::parse(o.out)["verdict"] == "Inconclusive");
  std::filesystem::remove(path);
}

TEST_CASE("classify") {
  Json lp2 = Json::parse(run_cli({"classify", "lp2"}).out);
  CHECK(lp2["linearity"] == "linear");
  CHECK(lp2["connectivity"]["verdict"] == "Failed");
  CHECK(lp2["degenerate"]["kind"] == "EvenCurve");
  CHECK(lp2["degenerate"]["transformed"].size() == 2);
  Json c3 = Json::parse(run_cli({"classify", "const3"}).out);
  CHECK(c3["linearity"] == "nonlinear");
  CHECK(c3["connectivity"]["verdict"] == "NecessaryOnly");
}

TEST_CASE("clt subcommand") {
  Outcome o = run_cli({"clt", "lp12_marked", "--order", "100"});
  CHECK(o.code == 0);
  Json j = Json::parse(o.out);
  CHECK(j["mu"].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(j["samples"].size() == 5);
  Outcome unmarked = run_cli({"clt", "lp12", "--order", "100"});
  CHECK(unmarked.code == 1);
  CHECK(unmarked.err.find("error[60] MarkMissing") != std::string::npos);
}

TEST_CASE("verify") {
  Outcome o = run_cli({"verify", "lp12", "lp2", "--order", "200"});
  CHECK(o.code == 0);
  CHECK(o.out.find("FAIL") == std::string::npos);
  CHECK(o.out.find("verify: all checks passed") != std::string::npos);
  Outcome j = run_cli({"verify", "lp12", "--order", "200", "--format", "json"});
  CHECK(Json::parse(j.out)["passed"] == true);
}

TEST_CASE("fixture resolution") {
  CHECK(std::filesystem::exists(resolve_equation_path("lp12")));
  CHECK(std::filesystem::exists(resolve_equation_path("lp12.json")));
  CHECK(oracle::error_code([] { resolve_equation_path("missing_fixture"); }) == ErrorCode::IoError);
}

TEST_CASE("number rounding") {
  CHECK(number_json(0.1 + 0.2).get<double>() == 0.3);
  CHECK(number_json(std::nan("")).is_null());
  CHECK(number_json(-0.0).dump() == "0.0");
}
