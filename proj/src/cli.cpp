#include "torsion/cli.hpp"

#include "torsion/spec_io.hpp"
#include "torsion/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <sstream>

namespace torsion::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.push_back("");
  return out;
}

int parse_int(const std::string& text, const char* what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(text, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != text.size()) throw InvalidArgument(std::string("bad ") + what + ": \"" + text + "\"");
  return v;
}

std::vector<FactorKind> parse_kinds(const std::string& text) {
  std::vector<FactorKind> out;
  for (const auto& k : split(text, ',')) out.push_back(parse_factor_kind(k));
  if (out.empty()) throw InvalidArgument("--model needs at least one kind");
  return out;
}

std::vector<SubgroupShape> parse_shapes(const std::string& text) {
  std::vector<SubgroupShape> out;
  for (const auto& item : split(text, ';')) {
    const auto parts = split(item, ',');
    if (parts.size() != 2) throw InvalidArgument("shape \"" + item + "\" is not of the form M,N");
    out.push_back({parse_int(parts[0], "shape exponent"), parse_int(parts[1], "shape exponent")});
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_int(item, "integer list"));
  return out;
}

json kinds_json(const std::vector<FactorKind>& kinds) {
  json arr = json::array();
  for (FactorKind k : kinds) arr.push_back(std::string(to_string(k)));
  return arr;
}

json shapes_json(const std::vector<SubgroupShape>& shapes) {
  json arr = json::array();
  for (const auto& s : shapes) arr.push_back(json::array({s.lower, s.upper}));
  return arr;
}

json labels_json(const std::vector<std::string>& labels) { return json(labels); }

void check_prime(std::uint64_t ell) {
  if (!is_prime(ell)) throw InvalidArgument("--ell " + std::to_string(ell) + " is not prime");
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("TORSION_BUDGET")) {
    const std::string text = env;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(text, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != text.size() || v == 0) throw InvalidArgument("TORSION_BUDGET must be a positive integer");
    return v;
  }
  return kDefaultBudget;
}

Report from_check(const std::string& command, const CheckReport& check, bool include_cells) {
  Report r;
  r.command = command;
  r.inputs = check.grid;
  json full = check.to_json(include_cells);
  r.results = {{"status", full["status"]}, {"counts", full["counts"]}};
  if (include_cells) r.results["cells"] = full["cells"];
  if (full.contains("counterexample")) r.witnesses["counterexample"] = full["counterexample"];
  r.constants = check.measured_constants;
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torsion growth exponents and Galois-model checks for products of elliptic curves", "torsion"};
  app.require_subcommand(1);

  std::string format = "table";
  std::uint64_t budget = 0;
  std::string out_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--budget", budget, "Enumeration cap (default 10000000, or TORSION_BUDGET)");
  app.add_option("--out", out_path, "Write the report to PATH instead of stdout");

  std::string spec_path;
  int grid_bound = 0;
  std::uint64_t ell = 0;
  int level = 0;
  std::string model_text, shapes_text;
  int scale = 1;
  bool cells = false;

  auto* alpha_cmd = app.add_subcommand("alpha", "alpha(A) with its maximizing subset");
  alpha_cmd->add_option("--spec", spec_path, "Spec file")->required();

  auto* minv_cmd = app.add_subcommand("minv", "m(A) by exact linear programming");
  minv_cmd->add_option("--spec", spec_path, "Spec file")->required();
  minv_cmd->add_option("--grid-bound", grid_bound, "Also scan integer profiles in [0, B]");

  auto* degree_cmd = app.add_subcommand("degree", "Degree of the torsion field of a product subgroup");
  degree_cmd->add_option("--ell", ell)->required();
  degree_cmd->add_option("--level", level)->required();
  degree_cmd->add_option("--model", model_text, "Comma-separated kinds: noncm, cmsplit, cmnonsplit")->required();
  degree_cmd->add_option("--shapes", shapes_text, "M1,N1[;M2,N2...]")->required();

  auto* worst_cmd = app.add_subcommand("worst", "Achieved ratio along the extremal exponent ray");
  worst_cmd->add_option("--spec", spec_path, "Spec file")->required();
  worst_cmd->add_option("--ell", ell, "Prime (defaults to the spec's ell)");
  worst_cmd->add_option("--scale", scale, "Multiple of the primitive ray")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Run a model check");
  verify_cmd->require_subcommand(1);
  verify_cmd->add_flag("--cells", cells, "Include every grid cell in the report");

  auto* v_gamma = verify_cmd->add_subcommand("gammamn", "G_{m,n} SL_2 = Gamma_m by set computation");
  v_gamma->add_option("--ell", ell)->required();
  v_gamma->add_option("--level", level)->required();

  std::string kind_text;
  auto* v_mu = verify_cmd->add_subcommand("mu", "Multiplier image of every fixer");
  v_mu->add_option("--kind", kind_text, "noncm, cmsplit or cmnonsplit")->required();
  v_mu->add_option("--ell", ell)->required();
  v_mu->add_option("--level", level)->required();

  std::string levels_text = "1,2,3";
  int spot_level = 0, oracle_level = 0;
  auto* v_par = verify_cmd->add_subcommand("parallelogram", "Stability of the product degree ratio");
  v_par->add_option("--ell", ell)->required();
  v_par->add_option("--model", model_text, "Comma-separated kinds")->required();
  v_par->add_option("--levels", levels_text, "Comma-separated levels")->capture_default_str();
  v_par->add_option("--spot-level", spot_level, "Large level on a sparse exponent grid");
  v_par->add_option("--oracle-level", oracle_level, "Level recomputed with the enumeration oracle");

  int t_max = 12;
  double tolerance = 0.05;
  auto* v_conv = verify_cmd->add_subcommand("convergence", "Achieved ratio tends to alpha");
  v_conv->add_option("--spec", spec_path, "Spec file")->required();
  v_conv->add_option("--ell", ell, "Prime (defaults to the spec's ell)");
  v_conv->add_option("--t-max", t_max)->capture_default_str();
  v_conv->add_option("--tolerance", tolerance)->capture_default_str();

  SpecUniverse universe;
  auto* v_aem = verify_cmd->add_subcommand("alpha-eq-m", "m(A) = alpha(A) over a universe of specs");
  v_aem->add_option("--max-classes", universe.max_classes)->capture_default_str();
  v_aem->add_option("--max-multiplicity", universe.max_multiplicity)->capture_default_str();
  v_aem->add_option("--grid-bound", universe.grid_bound, "0 skips the grid oracle")->capture_default_str();

  for (CLI::App* sub : {alpha_cmd, minv_cmd, degree_cmd, worst_cmd, verify_cmd, v_gamma, v_mu, v_par, v_conv, v_aem}) {
    sub->fallthrough();
  }

  std::vector<const char*> argv{"torsion"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (budget == 0) budget = default_budget();
    Report report;
    int code = kExitOk;

    auto spec_ell = [&](const SpecDocument& doc) {
      if (ell == 0) {
        if (!doc.ell) throw InvalidArgument("no --ell given and the spec has no ell");
        ell = *doc.ell;
      }
      check_prime(ell);
      return ell;
    };

    if (alpha_cmd->parsed()) {
      const SpecDocument doc = read_spec_file(spec_path);
      const SubsetWitness w = alpha(doc.spec);
      report.command = "alpha";
      report.inputs = {{"spec", spec_to_json(doc)}};
      report.results = {{"alpha", rational_json(w.value)},
                        {"method", doc.spec.classes.size() <= 20 ? "exhaustive" : "greedy"}};
      report.witnesses = {{"subset", labels_json(w.subset)}};
    } else if (minv_cmd->parsed()) {
      const SpecDocument doc = read_spec_file(spec_path);
      const RatioWitness m = m_invariant(doc.spec);
      report.command = "minv";
      report.inputs = {{"spec", spec_to_json(doc)}, {"grid_bound", grid_bound}};
      report.results = {{"m", rational_json(m.value)},
                        {"alpha", rational_json(alpha(doc.spec).value)},
                        {"regime", std::string(to_string(m.active_case))}};
      report.witnesses = {{"profile", to_json(m.profile)}};
      if (grid_bound > 0) {
        const RatioWitness g = m_invariant_grid(doc.spec, grid_bound);
        report.results["grid"] = rational_json(g.value);
        report.witnesses["grid_profile"] = to_json(g.profile);
      }
    } else if (degree_cmd->parsed()) {
      check_prime(ell);
      const std::vector<FactorKind> kinds = parse_kinds(model_text);
      const std::vector<SubgroupShape> shapes = parse_shapes(shapes_text);
      if (shapes.size() != kinds.size()) {
        throw InvalidArgument("--shapes lists " + std::to_string(shapes.size()) + " shapes for " +
                              std::to_string(kinds.size()) + " factors");
      }
      const Modulus mod(ell, level);
      ProductModel model{{}, mod};
      for (std::size_t i = 0; i < kinds.size(); ++i) model.factors.push_back({kinds[i], 1, "F" + std::to_string(i + 1)});
      const DegreeReport d = product_degree(model, shapes);
      report.command = "degree";
      report.inputs = {{"ell", ell}, {"level", level}, {"model", kinds_json(kinds)}, {"shapes", shapes_json(shapes)}};
      json per = json::array();
      for (const auto& x : d.per_factor_degrees) per.push_back(to_string(x));
      report.results = {{"degree", to_string(d.degree)},
                        {"ell_valuation", d.ell_valuation},
                        {"unit_part", to_string(d.unit_part)},
                        {"cyclotomic_exponent", d.cyclotomic_exponent},
                        {"group_order", to_string(d.group_order)},
                        {"fixer_order", to_string(d.fixer_order)},
                        {"per_factor_degrees", per}};
      std::vector<std::vector<Vec2>> gens;
      for (const auto& s : shapes) gens.push_back(standard_generators(mod, s));
      try {
        report.results["oracle_degree"] = to_string(enumerate_degree_oracle(model, gens, budget).degree);
      } catch (const Infeasible&) {
        report.results["oracle_degree"] = "skipped (over budget)";
      }
    } else if (worst_cmd->parsed()) {
      const SpecDocument doc = read_spec_file(spec_path);
      spec_ell(doc);
      const ExponentProfile profile = worst_case_profile(doc.spec, scale);
      const AchievedRatio ar = achieved_ratio(doc.spec, profile, ell);
      const Rational a = alpha(doc.spec).value;
      char ratio[64];
      std::snprintf(ratio, sizeof ratio, "%.12g", ar.ratio);
      report.command = "worst";
      report.inputs = {{"spec", spec_to_json(doc)}, {"ell", ell}, {"scale", scale}};
      report.results = {{"alpha", rational_json(a)},
                        {"ratio", ratio},
                        {"level", ar.level},
                        {"log_torsion", to_string(ar.log_torsion)},
                        {"degree", to_string(ar.degree.degree)},
                        {"degree_ell_valuation", ar.degree.ell_valuation},
                        {"degree_unit_part", to_string(ar.degree.unit_part)}};
      if (ar.exponent_ratio) report.results["exponent_ratio"] = rational_json(*ar.exponent_ratio);
      report.witnesses = {{"profile", to_json(profile)}};
    } else if (verify_cmd->parsed()) {
      CheckReport check;
      std::string name;
      if (v_gamma->parsed()) {
        check_prime(ell);
        check = check_gammamn(ell, level, budget);
        name = "verify gammamn";
      } else if (v_mu->parsed()) {
        check_prime(ell);
        check = check_property_mu(parse_factor_kind(kind_text), ell, level, budget);
        name = "verify mu";
      } else if (v_par->parsed()) {
        check_prime(ell);
        ParallelogramOptions opts;
        opts.levels = parse_int_list(levels_text);
        opts.spot_level = spot_level;
        opts.oracle_level = oracle_level;
        opts.budget = budget;
        check = check_parallelogram(parse_kinds(model_text), ell, opts);
        name = "verify parallelogram";
      } else if (v_conv->parsed()) {
        const SpecDocument doc = read_spec_file(spec_path);
        spec_ell(doc);
        check = check_alpha_convergence(doc.spec, ell, t_max, tolerance);
        check.grid["spec"] = spec_to_json(doc);
        name = "verify convergence";
      } else {
        check = check_alpha_eq_m(universe);
        name = "verify alpha-eq-m";
      }
      report = from_check(name, check, cells);
      if (!check.passed()) code = kExitCheckFailed;
    }

    const std::string text = format == "json" ? report.to_json().dump(2) + "\n" : report.to_table();
    if (out_path.empty()) {
      out << text;
    } else {
      write_atomically(out_path, text);
    }
    return code;
  } catch (const SpecError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
}

}  // namespace torsion::cli
