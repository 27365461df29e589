#pragma once

// Spec files and report emission.
//
// Spec file:
//   {"ell": 3, "factors": [{"label": "E1", "cm": false, "multiplicity": 2},
//                          {"label": "E2", "cm": true, "split": false}]}
// "ell" is optional, "multiplicity" defaults to 1, "split" (CM only) to true.

#include "torsion/invariants.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace torsion {

inline constexpr const char* kVersion = "0.1.0";

struct SpecDocument {
  std::optional<std::uint64_t> ell;
  VarietySpec spec;
};

/// Carries every validation problem found, not only the first.
class SpecError : public InvalidArgument {
 public:
  explicit SpecError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

SpecDocument parse_spec(const std::string& text);
SpecDocument read_spec_file(const std::string& path);
nlohmann::json spec_to_json(const SpecDocument& doc);

/// {"value": "p/q", "decimal": "..."}; both strings.
nlohmann::json rational_json(const Rational& r);

struct Report {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json witnesses = nlohmann::json::object();
  nlohmann::json constants = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// One "path  value" line per scalar leaf, grouped by section.
  std::string to_table() const;
};

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomically(const std::string& path, const std::string& contents);

}  // namespace torsion
