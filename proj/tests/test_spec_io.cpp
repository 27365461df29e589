#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torsion/spec_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace torsion;
using nlohmann::json;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e.errors();
  }
  return {};
}

// Some line of the table holds both the key and the value.
bool table_has(const std::string& table, const std::string& key, const std::string& value) {
  std::istringstream in(table);
  std::string line;
  while (std::getline(in, line)) {
    const auto k = line.find(key);
    if (k != std::string::npos && line.find(value, k + key.size()) != std::string::npos) return true;
  }
  return false;
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal spec") {
  const SpecDocument d = parse_spec(R"({"factors":[{"label":"E1","cm":false,"multiplicity":1}]})");
  CHECK_FALSE(d.ell.has_value());
  REQUIRE(d.spec.classes.size() == 1);
  CHECK(d.spec.classes[0].label == "E1");
  CHECK(d.spec.classes[0].type == CurveType::NonCM);
}

TEST_CASE("defaults and optional fields") {
  const SpecDocument d = parse_spec(R"({"ell":5,"factors":[{"label":"A","cm":true},
                                         {"label":"B","cm":true,"split":false,"multiplicity":3}]})");
  CHECK(d.ell == 5u);
  CHECK(d.spec.classes[0].multiplicity == 1);
  CHECK(d.spec.classes[0].split);
  CHECK_FALSE(d.spec.classes[1].split);
  CHECK(d.spec.classes[1].multiplicity == 3);
}

TEST_CASE("round trip") {
  const SpecDocument d = parse_spec(R"({"ell":3,"factors":[{"label":"A","cm":true,"split":false},
                                         {"label":"B","cm":false,"multiplicity":2}]})");
  const json j = spec_to_json(d);
  const SpecDocument again = parse_spec(j.dump());
  CHECK(spec_to_json(again) == j);
  CHECK(again.spec.classes[1].multiplicity == 2);
}

TEST_CASE("duplicate labels cite both positions") {
  const auto errs = errors_of(R"({"factors":[{"label":"E1","cm":false},{"label":"E1","cm":true}]})");
  REQUIRE(errs.size() == 1);
  CHECK(mentions(errs, "factors[1]"));
  CHECK(mentions(errs, "factors[0]"));
  CHECK(mentions(errs, "E1"));
}

TEST_CASE("non-prime ell") {
  const auto errs = errors_of(R"({"ell":6,"factors":[{"label":"E1","cm":false}]})");
  REQUIRE(errs.size() == 1);
  CHECK(mentions(errs, "not prime"));
}

TEST_CASE("all errors are collected") {
  const auto errs = errors_of(R"({"ell":6,"color":1,"factors":[{"label":"E","cm":false,"multiplicity":0},
                                   {"label":"E","cm":"yes"},{"cm":true,"split":1}]})");
  CHECK(errs.size() == 7);
  CHECK(mentions(errs, "not prime"));
  CHECK(mentions(errs, "unknown key \"color\""));
  CHECK(mentions(errs, "multiplicity"));
  CHECK(mentions(errs, "duplicate"));
  CHECK(mentions(errs, "cm must be a boolean"));
  CHECK(mentions(errs, "label must be"));
  CHECK(mentions(errs, "split must be"));
}

TEST_CASE("structural errors") {
  CHECK(mentions(errors_of("{not json"), "malformed JSON"));
  CHECK(mentions(errors_of("[1,2]"), "object"));
  CHECK(mentions(errors_of(R"({"ell":3})"), "factors must be an array"));
  CHECK(mentions(errors_of(R"({"factors":[]})"), "empty"));
  CHECK(mentions(errors_of(R"({"factors":[{"label":"A","cm":false,"split":true}]})"), "only applies"));
  CHECK(mentions(errors_of(R"({"factors":[{"label":"A","cm":false,"multiplicity":1.5}]})"), "multiplicity"));
  CHECK_THROWS_AS(read_spec_file("/nonexistent/spec.json"), InvalidArgument);
}

TEST_CASE("rational rendering") {
  const json r = rational_json(make_rational(4, 7));
  CHECK(r["value"] == "4/7");
  CHECK(r["decimal"].is_string());
  CHECK(r["decimal"].get<std::string>().substr(0, 5) == "0.571");
  CHECK(rational_json(make_rational(2, 1))["value"] == "2");
}

TEST_CASE("report table carries every JSON leaf") {
  Report rep;
  rep.command = "alpha";
  rep.inputs = {{"ell", 3}};
  rep.results = {{"alpha", rational_json(make_rational(4, 7))}, {"ok", true}};
  rep.witnesses = {{"subset", {"E1", "E2"}}};
  const json j = rep.to_json();
  for (const char* key : {"command", "inputs", "results", "witnesses", "constants", "version"}) CHECK(j.contains(key));
  const std::string table = rep.to_table();
  CHECK(table_has(table, "alpha.value", "4/7"));
  CHECK(table_has(table, "subset[1]", "E2"));
  CHECK(table.find("ok") != std::string::npos);
  CHECK(table.find("[constants]") == std::string::npos);
}

TEST_CASE("atomic writes") {
  const auto path = std::filesystem::temp_directory_path() / "torsion_atomic_test.txt";
  write_atomically(path.string(), "first");
  write_atomically(path.string(), "second");
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == "second");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_atomically("/nonexistent/dir/x.json", "x"), InvalidArgument);
}
