#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torsion/cli.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = torsion::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / ("torsion_cli_" + name);
  std::ofstream(p) << contents;
  return p.string();
}

const std::string kTwoNonCM =
    R"({"ell":3,"factors":[{"label":"E1","cm":false},{"label":"E2","cm":false}]})";

void collect(const json& v, std::vector<std::string>& leaves) {
  if (v.is_object()) {
    for (const auto& [k, child] : v.items()) collect(child, leaves);
  } else if (v.is_array()) {
    for (const auto& child : v) collect(child, leaves);
  } else {
    leaves.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
}

}  // namespace

TEST_CASE("alpha on two non-CM classes") {
  const std::string spec = write_temp("two.json", kTwoNonCM);
  const Outcome r = run({"alpha", "--spec", spec, "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "alpha");
  CHECK(j["results"]["alpha"]["value"] == "4/7");
  CHECK(j["witnesses"]["subset"] == json::array({"E1", "E2"}));
}

TEST_CASE("global flags may follow the subcommand or precede it") {
  const std::string spec = write_temp("two.json", kTwoNonCM);
  const Outcome a = run({"--format", "json", "alpha", "--spec", spec});
  const Outcome b = run({"alpha", "--spec", spec, "--format", "json"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("degree example") {
  const Outcome r = run({"degree", "--ell", "2", "--level", "1", "--model", "noncm", "--shapes", "1,1", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["results"]["degree"] == "6");
  CHECK(j["results"]["oracle_degree"] == "6");

  const Outcome two = run({"degree", "--ell", "3", "--level", "2", "--model", "noncm,cmsplit", "--shapes", "1,2;0,2"});
  CHECK(two.code == 0);
  CHECK(two.out.find("degree") != std::string::npos);
}

TEST_CASE("verify gammamn succeeds") {
  const Outcome r = run({"verify", "gammamn", "--ell", "3", "--level", "2", "--format", "json"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["results"]["status"] == "pass");
  CHECK(j["results"]["counts"]["pass"] == 6);
}

TEST_CASE("other subcommands") {
  const std::string spec = write_temp("two.json", kTwoNonCM);
  const Outcome m = run({"minv", "--spec", spec, "--grid-bound", "3", "--format", "json"});
  REQUIRE(m.code == 0);
  CHECK(json::parse(m.out)["results"]["m"]["value"] == "4/7");

  const Outcome w = run({"worst", "--spec", spec, "--scale", "2", "--format", "json"});
  REQUIRE(w.code == 0);
  CHECK(json::parse(w.out)["inputs"]["ell"] == 3);

  CHECK(run({"verify", "mu", "--kind", "cmsplit", "--ell", "3", "--level", "2"}).code == 0);
  CHECK(run({"verify", "parallelogram", "--ell", "2", "--model", "cmsplit,noncm", "--levels", "1,2"}).code == 0);
  CHECK(run({"verify", "convergence", "--spec", spec, "--t-max", "6", "--tolerance", "0.2"}).code == 0);
  CHECK(run({"verify", "alpha-eq-m", "--max-classes", "2", "--grid-bound", "3"}).code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"alpha"}).code == 2);
  CHECK(run({"degree", "--ell", "2", "--level", "1", "--model", "noncm", "--shapes", "1,1", "--bogus"}).code == 2);
  CHECK(run({"degree", "--ell", "6", "--level", "1", "--model", "noncm", "--shapes", "1,1"}).code == 2);
  CHECK(run({"degree", "--ell", "2", "--level", "1", "--model", "noncm", "--shapes", "1,1;0,0"}).code == 2);
  CHECK(run({"degree", "--ell", "2", "--level", "1", "--model", "torus", "--shapes", "1,1"}).code == 2);
  CHECK(run({"alpha", "--spec", "/nonexistent.json"}).code == 2);
  CHECK(run({"--format", "xml", "alpha", "--spec", "x"}).code == 2);

  const std::string bad = write_temp("bad.json", R"({"ell":6,"factors":[{"label":"E1","cm":false}]})");
  const Outcome b = run({"alpha", "--spec", bad});
  CHECK(b.code == 2);
  CHECK(b.err.find("not prime") != std::string::npos);

  const Outcome inf = run({"verify", "gammamn", "--ell", "5", "--level", "3", "--budget", "1000"});
  CHECK(inf.code == 3);
  CHECK(inf.err.find("budget") != std::string::npos);

  const std::string spec = write_temp("two.json", kTwoNonCM);
  CHECK(run({"verify", "convergence", "--spec", spec, "--t-max", "3", "--tolerance", "1e-9"}).code == 1);
  const Outcome unknown = run({"frobnicate"});
  CHECK(unknown.err.find("Usage") != std::string::npos);
}

TEST_CASE("budget from the environment") {
  setenv("TORSION_BUDGET", "1000", 1);
  CHECK(run({"verify", "gammamn", "--ell", "3", "--level", "2"}).code == 3);
  CHECK(run({"verify", "gammamn", "--ell", "3", "--level", "2", "--budget", "100000"}).code == 0);
  setenv("TORSION_BUDGET", "lots", 1);
  CHECK(run({"verify", "gammamn", "--ell", "3", "--level", "2"}).code == 2);
  unsetenv("TORSION_BUDGET");
  CHECK(run({"verify", "gammamn", "--ell", "3", "--level", "2"}).code == 0);
}

TEST_CASE("json output is deterministic and matches the table") {
  const std::string spec = write_temp("two.json", kTwoNonCM);
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"alpha", "--spec", spec},
           {"minv", "--spec", spec},
           {"worst", "--spec", spec, "--scale", "3"},
           {"degree", "--ell", "3", "--level", "2", "--model", "noncm,cmnonsplit", "--shapes", "1,2;0,2"},
           {"verify", "mu", "--kind", "noncm", "--ell", "3", "--level", "2"}}) {
    auto json_args = args;
    json_args.insert(json_args.end(), {"--format", "json"});
    const Outcome a = run(json_args), b = run(json_args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const Outcome table = run(args);
    REQUIRE(table.code == 0);
    std::vector<std::string> leaves;
    collect(json::parse(a.out), leaves);
    for (const auto& leaf : leaves) {
      CAPTURE(leaf);
      CHECK(table.out.find(leaf) != std::string::npos);
    }
  }
}

TEST_CASE("--out writes the report to a file") {
  const fs::path p = fs::temp_directory_path() / "torsion_cli_report.json";
  fs::remove(p);
  const Outcome r = run({"degree", "--ell", "2", "--level", "1", "--model", "noncm", "--shapes", "1,1", "--format",
                         "json", "--out", p.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(p);
  json j;
  in >> j;
  CHECK(j["results"]["degree"] == "6");
  fs::remove(p);
}

TEST_CASE("help") {
  const Outcome r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("verify") != std::string::npos);
}
