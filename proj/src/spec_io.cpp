#include "torsion/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace torsion {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid spec:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

}  // namespace

SpecError::SpecError(std::vector<std::string> errors)
    : InvalidArgument(join_errors(errors)), errors_(std::move(errors)) {}

SpecDocument parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError({std::string("malformed JSON: ") + e.what()});
  }
  std::vector<std::string> errors;
  SpecDocument out;
  if (!doc.is_object()) throw SpecError({"top level must be an object"});

  for (const auto& [key, value] : doc.items()) {
    if (key != "ell" && key != "factors") errors.push_back("unknown key \"" + key + "\"");
  }
  if (doc.contains("ell")) {
    const json& e = doc["ell"];
    if (!e.is_number_unsigned()) {
      errors.push_back("ell must be a positive integer");
    } else if (!is_prime(e.get<std::uint64_t>())) {
      errors.push_back("ell = " + std::to_string(e.get<std::uint64_t>()) + " is not prime");
    } else {
      out.ell = e.get<std::uint64_t>();
    }
  }

  if (!doc.contains("factors") || !doc["factors"].is_array()) {
    errors.push_back("factors must be an array");
    throw SpecError(errors);
  }
  const json& factors = doc["factors"];
  if (factors.empty()) errors.push_back("factors is empty");
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const json& f = factors[i];
    const std::string where = "factors[" + std::to_string(i) + "]";
    if (!f.is_object()) {
      errors.push_back(where + ": must be an object");
      continue;
    }
    for (const auto& [key, value] : f.items()) {
      if (key != "label" && key != "cm" && key != "multiplicity" && key != "split") {
        errors.push_back(where + ": unknown key \"" + key + "\"");
      }
    }
    CurveClass c;
    bool ok = true;
    if (!f.contains("label") || !f["label"].is_string() || f["label"].get<std::string>().empty()) {
      errors.push_back(where + ": label must be a nonempty string");
      ok = false;
    } else {
      c.label = f["label"].get<std::string>();
      auto [it, inserted] = seen.emplace(c.label, i);
      if (!inserted) {
        errors.push_back(where + ": duplicate label \"" + c.label + "\" (first at factors[" +
                         std::to_string(it->second) + "])");
        ok = false;
      }
    }
    if (!f.contains("cm") || !f["cm"].is_boolean()) {
      errors.push_back(where + ": cm must be a boolean");
      ok = false;
    } else {
      c.type = f["cm"].get<bool>() ? CurveType::CM : CurveType::NonCM;
    }
    if (f.contains("multiplicity")) {
      const json& m = f["multiplicity"];
      if (!m.is_number_integer() || m.get<std::int64_t>() < 1) {
        errors.push_back(where + ": multiplicity must be an integer >= 1");
        ok = false;
      } else if (m.get<std::int64_t>() > 1'000'000) {
        errors.push_back(where + ": multiplicity too large");
        ok = false;
      } else {
        c.multiplicity = static_cast<int>(m.get<std::int64_t>());
      }
    }
    if (f.contains("split")) {
      if (!f["split"].is_boolean()) {
        errors.push_back(where + ": split must be a boolean");
        ok = false;
      } else if (c.type != CurveType::CM) {
        errors.push_back(where + ": split only applies to CM classes");
        ok = false;
      } else {
        c.split = f["split"].get<bool>();
      }
    }
    if (ok) out.spec.classes.push_back(std::move(c));
  }
  if (!errors.empty()) throw SpecError(errors);
  out.spec.validate();
  return out;
}

SpecDocument read_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read spec file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

json spec_to_json(const SpecDocument& doc) {
  json out = json::object();
  if (doc.ell) out["ell"] = *doc.ell;
  json factors = json::array();
  for (const auto& c : doc.spec.classes) {
    json f{{"label", c.label}, {"cm", c.type == CurveType::CM}, {"multiplicity", c.multiplicity}};
    if (c.type == CurveType::CM && !c.split) f["split"] = false;
    factors.push_back(std::move(f));
  }
  out["factors"] = std::move(factors);
  return out;
}

json rational_json(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", r.get_d());
  return {{"value", to_string(r)}, {"decimal", buf}};
}

json Report::to_json() const {
  return {{"command", command}, {"inputs", inputs},       {"results", results},
          {"witnesses", witnesses}, {"constants", constants}, {"version", kVersion}};
}

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const json& v, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    if (v.empty()) out.push_back({path, "{}"});
    for (const auto& [k, child] : v.items()) flatten(child, path.empty() ? k : path + "." + k, out);
  } else if (v.is_array()) {
    if (v.empty()) out.push_back({path, "[]"});
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out.push_back({path, scalar_text(v)});
  }
}

}  // namespace

std::string Report::to_table() const {
  std::ostringstream os;
  os << "command  " << command << "\n";
  const std::pair<const char*, const json*> sections[] = {
      {"inputs", &inputs}, {"results", &results}, {"witnesses", &witnesses}, {"constants", &constants}};
  for (const auto& [name, body] : sections) {
    if (body->empty()) continue;
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(*body, "", rows);
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.first.size());
    os << "\n[" << name << "]\n";
    for (const auto& [k, v] : rows) os << "  " << k << std::string(width - k.size() + 2, ' ') << v << "\n";
  }
  os << "\nversion  " << kVersion << "\n";
  return os.str();
}

void write_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw InvalidArgument("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw InvalidArgument("cannot rename onto " + path);
  }
}

}  // namespace torsion
