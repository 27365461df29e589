#include "torsion/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

namespace torsion {

using nlohmann::json;

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Pass: return "pass";
    case CellStatus::Fail: return "fail";
    case CellStatus::Skipped: return "skipped";
  }
  return "?";
}

void CheckReport::add(json params, bool ok, json values) {
  cells.push_back({std::move(params), ok ? CellStatus::Pass : CellStatus::Fail, std::move(values)});
}

void CheckReport::skip(json params, std::string reason) {
  cells.push_back({std::move(params), CellStatus::Skipped, json{{"reason", std::move(reason)}}});
}

bool CheckReport::passed() const {
  return count(CellStatus::Fail) == 0 && count(CellStatus::Pass) > 0;
}

std::size_t CheckReport::count(CellStatus status) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [&](const CheckCell& c) { return c.status == status; }));
}

std::optional<CheckCell> CheckReport::first_failure() const {
  for (const auto& c : cells) {
    if (c.status == CellStatus::Fail) return c;
  }
  return std::nullopt;
}

json CheckReport::to_json(bool include_cells) const {
  json out{{"check", name},
           {"grid", grid},
           {"status", passed() ? "pass" : "fail"},
           {"counts",
            {{"pass", count(CellStatus::Pass)},
             {"fail", count(CellStatus::Fail)},
             {"skipped", count(CellStatus::Skipped)}}},
           {"measured_constants", measured_constants}};
  if (auto f = first_failure()) {
    out["counterexample"] = {{"params", f->params}, {"values", f->values}};
  }
  if (include_cells) {
    json cells_json = json::array();
    for (const auto& c : cells) {
      cells_json.push_back({{"params", c.params}, {"status", to_string(c.status)}, {"values", c.values}});
    }
    out["cells"] = std::move(cells_json);
  }
  return out;
}

std::string decimal(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", r.get_d());
  return buf;
}

json to_json(const ExponentProfile& profile) {
  auto block = [](const std::vector<std::string>& labels, const std::vector<Rational>& x) {
    json arr = json::array();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      arr.push_back({{"label", labels[i]},
                     {"lower", to_string(x[i])},
                     {"upper", to_string(x[i + labels.size()])}});
    }
    return arr;
  };
  return {{"noncm", block(profile.noncm_labels, profile.c)},
          {"cm", block(profile.cm_labels, profile.b)},
          {"beta", to_string(profile.beta())}};
}

namespace {

json shape_json(const SubgroupShape& s) { return json::array({s.lower, s.upper}); }

std::vector<SubgroupShape> all_shapes(int level) {
  std::vector<SubgroupShape> out;
  for (int m = 0; m <= level; ++m)
    for (int n = m; n <= level; ++n) out.push_back({m, n});
  return out;
}

// Calls f on every element of the cartesian product of the choice lists.
template <typename T, typename F>
void for_each_product(const std::vector<std::vector<T>>& choices, F&& f) {
  std::vector<T> current(choices.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == choices.size()) {
      f(current);
      return;
    }
    for (const T& x : choices[i]) {
      current[i] = x;
      rec(i + 1);
    }
  };
  rec(0);
}

std::vector<std::vector<FactorKind>> kind_tuples(std::size_t r) {
  const std::vector<FactorKind> kinds{FactorKind::NonCM, FactorKind::CMSplit, FactorKind::CMNonsplit};
  std::vector<std::vector<FactorKind>> out;
  for_each_product(std::vector<std::vector<FactorKind>>(r, kinds),
                   [&](const std::vector<FactorKind>& t) { out.push_back(t); });
  return out;
}

json kinds_json(const std::vector<FactorKind>& kinds) {
  json arr = json::array();
  for (FactorKind k : kinds) arr.push_back(std::string(to_string(k)));
  return arr;
}

ProductModel model_of(const std::vector<FactorKind>& kinds, const Modulus& mod) {
  ProductModel model{{}, mod};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    model.factors.push_back({kinds[i], 1, "F" + std::to_string(i + 1)});
  }
  return model;
}

std::vector<std::vector<Vec2>> generators_of(const Modulus& mod, const std::vector<SubgroupShape>& shapes) {
  std::vector<std::vector<Vec2>> out;
  for (const auto& s : shapes) out.push_back(standard_generators(mod, s));
  return out;
}

SubgroupShape effective_shape(FactorKind kind, const SubgroupShape& shape) {
  return kind == FactorKind::NonCM ? shape : stabilize_subgroup(kind, shape);
}

}  // namespace

// ---------------------------------------------------------------------------

CheckReport check_gammamn(std::uint64_t ell, int level, std::uint64_t budget) {
  const Modulus mod(ell, level);
  CheckReport report;
  report.name = "gammamn";
  report.grid = {{"ell", ell}, {"level", level}};
  if (factor_group_order(FactorKind::NonCM, mod) > BigInt(static_cast<unsigned long>(budget))) {
    throw Infeasible("check_gammamn: |GL_2(Z/" + std::to_string(ell) + "^" + std::to_string(level) +
                     ")| exceeds the enumeration budget");
  }
  const std::uint64_t q = mod.value();
  const std::uint64_t cells = q * q * q * q;
  auto index = [q](const Mat2& g) { return ((g.a * q + g.b) * q + g.c) * q + g.d; };
  auto decode = [q](std::uint64_t i) {
    Mat2 g;
    g.d = i % q;
    i /= q;
    g.c = i % q;
    i /= q;
    g.b = i % q;
    g.a = i / q;
    return g;
  };

  std::vector<Mat2> sl2;
  std::vector<std::uint64_t> dets(cells);
  for (std::uint64_t i = 0; i < cells; ++i) {
    const Mat2 g = decode(i);
    dets[i] = mat2_det_invertible(g, mod).det;
    if (dets[i] == 1 % q) sl2.push_back(g);
  }

  for (const SubgroupShape& s : all_shapes(level)) {
    std::vector<char> product(cells, 0);
    std::uint64_t fixer_size = 0;
    std::uint64_t cosets = 0;
    for (std::uint64_t i = 0; i < cells; ++i) {
      const Mat2 g = decode(i);
      if (!mod.is_unit(dets[i])) continue;
      if (!mod.congruent(g.a, 1, s.lower) || !mod.congruent(g.c, 0, s.lower)) continue;
      if (!mod.congruent(g.b, 0, s.upper) || !mod.congruent(g.d, 1, s.upper)) continue;
      ++fixer_size;
      if (product[i]) continue;
      ++cosets;
      for (const Mat2& h : sl2) product[index(mat2_mul(g, h, mod))] = 1;
    }
    std::uint64_t product_size = 0, gamma_size = 0;
    std::optional<std::uint64_t> witness;
    for (std::uint64_t i = 0; i < cells; ++i) {
      const bool in_gamma = mod.is_unit(dets[i]) && mod.congruent(dets[i], 1, s.lower);
      product_size += product[i] ? 1 : 0;
      gamma_size += in_gamma ? 1 : 0;
      if ((product[i] != 0) != in_gamma && !witness) witness = i;
    }
    json values{{"fixer_order", fixer_size},
                {"cosets", cosets},
                {"product_size", product_size},
                {"gamma_m_size", gamma_size}};
    if (witness) {
      const Mat2 g = decode(*witness);
      values["mismatch"] = json::array({g.a, g.b, g.c, g.d});
    }
    report.add({{"ell", ell}, {"level", level}, {"shape", shape_json(s)}}, !witness, values);
  }
  return report;
}

CheckReport check_property_mu(FactorKind kind, std::uint64_t ell, int level, std::uint64_t budget) {
  const Modulus mod(ell, level);
  CheckReport report;
  report.name = "property_mu";
  report.grid = {{"kind", std::string(to_string(kind))}, {"ell", ell}, {"level", level}};
  BigInt worst_defect = 1;
  for (const SubgroupShape& raw : all_shapes(level)) {
    const SubgroupShape eff = effective_shape(kind, raw);
    json params{{"kind", std::string(to_string(kind))}, {"ell", ell}, {"level", level}, {"shape", shape_json(raw)}};
    MultiplierFibers enumerated;
    try {
      enumerated = enumerate_fixer_fibers(kind, mod, raw, budget);
    } catch (const Infeasible& e) {
      report.skip(params, e.what());
      continue;
    }
    const MultiplierFibers formula = fixer_multiplier_fibers(kind, mod, raw);
    const int expected = eff.lower;

    bool image_is_step = true;
    for (const auto& [lambda, count] : enumerated.per_class_counts) {
      if (!in_unit_filtration(lambda, mod, expected)) image_is_step = false;
    }
    const BigInt target = unit_filtration_size(mod, expected);
    image_is_step = image_is_step && enumerated.image_size == target;
    const BigInt defect = target / enumerated.image_size;
    worst_defect = std::max(worst_defect, defect);

    bool ok = image_is_step && enumerated.uniform && defect == 1 &&
              enumerated.fixer_order == formula.fixer_order &&
              enumerated.coset_exponent == formula.coset_exponent;
    json values{{"stabilized_shape", shape_json(eff)},
                {"expected_exponent", expected},
                {"coset_exponent", enumerated.coset_exponent},
                {"formula_coset_exponent", formula.coset_exponent},
                {"fixer_order", to_string(enumerated.fixer_order)},
                {"image_size", to_string(enumerated.image_size)},
                {"uniform", enumerated.uniform},
                {"index_defect", to_string(defect)}};
    if (kind != FactorKind::NonCM && !(eff == raw)) {
      // The fixer does not see the stabilization for abelian factor groups.
      const MultiplierFibers stable = enumerate_fixer_fibers(kind, mod, eff, budget);
      const bool same = stable.per_class_counts == enumerated.per_class_counts;
      values["fixer_equals_stabilized_fixer"] = same;
      ok = ok && same;
    }
    report.add(params, ok, values);
  }
  report.measured_constants["max_index_defect"] = to_string(worst_defect);
  return report;
}

CheckReport check_degree_oracle(const std::vector<std::uint64_t>& ells, int max_level, std::size_t max_factors,
                                std::uint64_t budget) {
  CheckReport report;
  report.name = "degree_oracle";
  report.grid = {{"ells", ells}, {"max_level", max_level}, {"max_factors", max_factors}};
  for (std::uint64_t ell : ells) {
    for (int level = 1; level <= max_level; ++level) {
      const Modulus mod(ell, level);
      for (std::size_t r = 1; r <= max_factors; ++r) {
        for (const auto& kinds : kind_tuples(r)) {
          const ProductModel model = model_of(kinds, mod);
          for_each_product(std::vector<std::vector<SubgroupShape>>(r, all_shapes(level)),
                           [&](const std::vector<SubgroupShape>& shapes) {
                             json params{{"ell", ell}, {"level", level}, {"kinds", kinds_json(kinds)}};
                             json sj = json::array();
                             for (const auto& s : shapes) sj.push_back(shape_json(s));
                             params["shapes"] = sj;
                             OracleDegree oracle;
                             try {
                               oracle = enumerate_degree_oracle(model, generators_of(mod, shapes), budget);
                             } catch (const Infeasible& e) {
                               report.skip(params, e.what());
                               return;
                             }
                             const DegreeReport formula = product_degree(model, shapes);
                             const bool ok =
                                 formula.degree == oracle.degree && formula.group_order == oracle.group_order;
                             report.add(params, ok,
                                        {{"formula_degree", to_string(formula.degree)},
                                         {"oracle_degree", to_string(oracle.degree)},
                                         {"group_order", to_string(oracle.group_order)}});
                           });
        }
      }
    }
  }
  report.measured_constants["mismatches"] = report.count(CellStatus::Fail);
  return report;
}

CheckReport check_degree_lower_bounds(const std::vector<std::uint64_t>& ells, int max_level,
                                      std::uint64_t budget) {
  CheckReport report;
  report.name = "degree_lower_bounds";
  report.grid = {{"ells", ells}, {"max_level", max_level}};
  for (std::uint64_t ell : ells) {
    for (int level = 1; level <= max_level; ++level) {
      const Modulus mod(ell, level);
      for (FactorKind kind : {FactorKind::NonCM, FactorKind::CMSplit, FactorKind::CMNonsplit}) {
        const ProductModel model = model_of({kind}, mod);
        for (const SubgroupShape& s : all_shapes(level)) {
          const int bound = kind == FactorKind::NonCM ? 2 * (s.lower + s.upper) - 3 : (s.lower + s.upper) - 2;
          const DegreeReport formula = product_degree(model, {s});
          BigInt degree = formula.degree;
          json values{{"bound_exponent", bound}, {"degree", to_string(degree)}, {"log_ell_degree", formula.log_ell(ell)}};
          try {
            const OracleDegree oracle = enumerate_degree_oracle(model, generators_of(mod, {s}), budget);
            values["oracle_degree"] = to_string(oracle.degree);
            degree = std::min(degree, oracle.degree);
          } catch (const Infeasible&) {
            values["oracle_degree"] = nullptr;
          }
          const bool ok = bound <= 0 || degree >= big_pow(ell, static_cast<unsigned long>(bound));
          report.add({{"ell", ell}, {"level", level}, {"kind", std::string(to_string(kind))}, {"shape", shape_json(s)}},
                     ok, values);
        }
      }
    }
  }
  return report;
}

Rational parallelogram_ratio(const ProductModel& model, const std::vector<SubgroupShape>& shapes) {
  const DegreeReport rep = product_degree(model, shapes);
  int sum_m = 0, max_m = 0;
  BigInt prod = 1;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const int mu = shapes[i].lower;
    sum_m += mu;
    max_m = std::max(max_m, mu);
    prod *= rep.per_factor_degrees[i];
  }
  return make_rational(rep.degree * big_pow(model.modulus.ell(), static_cast<unsigned long>(sum_m - max_m)), prod);
}

namespace {

std::vector<SubgroupShape> parallelogram_shapes(FactorKind kind, int level, const std::vector<int>& exponents) {
  std::vector<SubgroupShape> out;
  for (int m : exponents) {
    for (int n : exponents) {
      if (m > n) continue;
      SubgroupShape s = effective_shape(kind, {m, n});
      if (std::find(out.begin(), out.end(), s) == out.end() && s.upper <= level) out.push_back(s);
    }
  }
  return out;
}

std::vector<int> full_range(int level) {
  std::vector<int> out;
  for (int k = 0; k <= level; ++k) out.push_back(k);
  return out;
}

Rational fold_c(const Rational& r) { return r >= 1 ? r : Rational(1 / r); }

}  // namespace

CheckReport check_parallelogram(const std::vector<FactorKind>& kinds, std::uint64_t ell,
                                const ParallelogramOptions& options) {
  if (kinds.empty()) throw InvalidArgument("check_parallelogram: no factors");
  if (options.levels.empty()) throw InvalidArgument("check_parallelogram: no levels");
  CheckReport report;
  report.name = "parallelogram";
  report.grid = {{"ell", ell}, {"kinds", kinds_json(kinds)}, {"levels", options.levels},
                 {"spot_level", options.spot_level}, {"oracle_level", options.oracle_level}};

  auto sweep = [&](int level, const std::vector<int>& exponents, auto&& on_cell) {
    const ProductModel model = model_of(kinds, Modulus(ell, level));
    std::vector<std::vector<SubgroupShape>> choices;
    for (FactorKind k : kinds) choices.push_back(parallelogram_shapes(k, level, exponents));
    for_each_product(choices, [&](const std::vector<SubgroupShape>& shapes) { on_cell(model, shapes); });
  };

  std::optional<Rational> reference_c;
  bool stable = true;
  json per_level = json::object();
  for (int level : options.levels) {
    std::optional<Rational> lo, hi;
    sweep(level, full_range(level), [&](const ProductModel& model, const std::vector<SubgroupShape>& shapes) {
      const Rational r = parallelogram_ratio(model, shapes);
      if (!lo || r < *lo) lo = r;
      if (!hi || r > *hi) hi = r;
    });
    const Rational c = std::max(fold_c(*lo), fold_c(*hi));
    if (!reference_c) reference_c = c;
    const bool same = c == *reference_c;
    stable = stable && same;
    per_level[std::to_string(level)] = to_string(c);
    report.add({{"level", level}}, same,
               {{"min_R", to_string(*lo)}, {"max_R", to_string(*hi)}, {"C", to_string(c)}, {"C_decimal", decimal(c)}});
  }

  if (options.spot_level > 0) {
    const int N = options.spot_level;
    std::vector<int> exps{0, 1, 2, N / 2, N - 1, N};
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
    exps.erase(std::remove_if(exps.begin(), exps.end(), [&](int e) { return e < 0 || e > N; }), exps.end());
    std::optional<Rational> lo, hi;
    sweep(N, exps, [&](const ProductModel& model, const std::vector<SubgroupShape>& shapes) {
      const Rational r = parallelogram_ratio(model, shapes);
      if (!lo || r < *lo) lo = r;
      if (!hi || r > *hi) hi = r;
    });
    const bool inside = *lo >= 1 / *reference_c && *hi <= *reference_c;
    report.add({{"level", N}, {"spot", true}}, inside, {{"min_R", to_string(*lo)}, {"max_R", to_string(*hi)}});
  }

  if (options.oracle_level > 0) {
    const int N = options.oracle_level;
    sweep(N, full_range(N), [&](const ProductModel& model, const std::vector<SubgroupShape>& shapes) {
      json sj = json::array();
      for (const auto& s : shapes) sj.push_back(shape_json(s));
      json params{{"level", N}, {"oracle", true}, {"shapes", sj}};
      try {
        const Modulus& mod = model.modulus;
        const OracleDegree whole = enumerate_degree_oracle(model, generators_of(mod, shapes), options.budget);
        BigInt prod = 1;
        int sum_m = 0, max_m = 0;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
          const ProductModel single{{model.factors[i]}, mod};
          prod *= enumerate_degree_oracle(single, {standard_generators(mod, shapes[i])}, options.budget).degree;
          sum_m += shapes[i].lower;
          max_m = std::max(max_m, shapes[i].lower);
        }
        const Rational oracle_r =
            make_rational(whole.degree * big_pow(ell, static_cast<unsigned long>(sum_m - max_m)), prod);
        const Rational formula_r = parallelogram_ratio(model, shapes);
        report.add(params, oracle_r == formula_r, {{"oracle_R", to_string(oracle_r)}, {"formula_R", to_string(formula_r)}});
      } catch (const Infeasible& e) {
        report.skip(params, e.what());
      }
    });
  }

  report.measured_constants["C"] = to_string(*reference_c);
  report.measured_constants["C_decimal"] = decimal(*reference_c);
  report.measured_constants["C_per_level"] = per_level;
  report.measured_constants["stable"] = stable;
  return report;
}

CheckReport check_alpha_convergence(const VarietySpec& spec, std::uint64_t ell, int t_max, double tolerance) {
  if (t_max < 1) throw InvalidArgument("check_alpha_convergence: t_max must be >= 1");
  CheckReport report;
  report.name = "alpha_convergence";
  const SubsetWitness a = alpha(spec);
  const double target = a.value.get_d();
  report.grid = {{"ell", ell}, {"t_max", t_max}, {"tolerance", tolerance}, {"alpha", to_string(a.value)}};
  double previous = std::numeric_limits<double>::infinity();
  json gaps = json::array();
  for (int t = 1; t <= t_max; ++t) {
    const ExponentProfile profile = worst_case_profile(spec, t);
    const AchievedRatio ar = achieved_ratio(spec, profile, ell);
    const double gap = std::abs(ar.ratio - target);
    gaps.push_back(gap);
    bool ok = gap <= previous;
    if (t == t_max) ok = ok && gap < tolerance;
    json values{{"ratio", ar.ratio},
                {"gap", gap},
                {"level", ar.level},
                {"log_torsion", to_string(ar.log_torsion)},
                {"degree_ell_valuation", ar.degree.ell_valuation},
                {"degree_unit_part", to_string(ar.degree.unit_part)}};
    if (ar.exponent_ratio) values["exponent_ratio"] = to_string(*ar.exponent_ratio);
    report.add({{"t", t}}, ok, values);
    previous = gap;
  }
  report.measured_constants["gap_sequence"] = gaps;
  report.measured_constants["final_gap"] = gaps.back();
  return report;
}

std::vector<VarietySpec> enumerate_universe(const SpecUniverse& universe) {
  std::vector<std::pair<CurveType, int>> types;
  for (CurveType t : {CurveType::NonCM, CurveType::CM})
    for (int mult = 1; mult <= universe.max_multiplicity; ++mult) types.push_back({t, mult});
  std::vector<VarietySpec> out;
  for (int k = 1; k <= universe.max_classes; ++k) {
    for_each_product(std::vector<std::vector<std::pair<CurveType, int>>>(static_cast<std::size_t>(k), types),
                     [&](const std::vector<std::pair<CurveType, int>>& seq) {
                       VarietySpec spec;
                       for (std::size_t i = 0; i < seq.size(); ++i) {
                         spec.classes.push_back({"E" + std::to_string(i + 1), seq[i].first, seq[i].second, true});
                       }
                       out.push_back(std::move(spec));
                     });
  }
  return out;
}

CheckReport check_alpha_eq_m(const SpecUniverse& universe) {
  CheckReport report;
  report.name = "alpha_eq_m";
  report.grid = {{"max_classes", universe.max_classes},
                 {"max_multiplicity", universe.max_multiplicity},
                 {"grid_bound", universe.grid_bound}};
  // The grid value only depends on the multiset of (kind, multiplicity).
  std::map<std::vector<std::pair<int, int>>, Rational> grid_cache;
  std::size_t grid_equal = 0;
  for (const VarietySpec& spec : enumerate_universe(universe)) {
    json desc = json::array();
    std::vector<std::pair<int, int>> key;
    for (const auto& c : spec.classes) {
      desc.push_back((c.type == CurveType::CM ? "cm" : "noncm") + std::string("x") + std::to_string(c.multiplicity));
      key.push_back({c.type == CurveType::CM ? 1 : 0, c.multiplicity});
    }
    std::sort(key.begin(), key.end());

    const SubsetWitness a = alpha_exhaustive(spec);
    const SubsetWitness g = alpha_greedy(spec);
    const RatioWitness m = m_invariant(spec);
    bool ok = a.value == m.value && a.value == g.value;
    json values{{"alpha", to_string(a.value)}, {"alpha_greedy", to_string(g.value)}, {"m", to_string(m.value)}};

    if (universe.grid_bound > 0) {
      auto it = grid_cache.find(key);
      if (it == grid_cache.end()) {
        it = grid_cache.emplace(key, m_invariant_grid(spec, universe.grid_bound).value).first;
      }
      const Rational& grid = it->second;
      const ExponentProfile ray = worst_case_profile(spec, 1);
      Rational biggest = 0;
      for (const auto& x : ray.c) biggest = std::max(biggest, x);
      for (const auto& x : ray.b) biggest = std::max(biggest, x);
      const bool fits = biggest <= universe.grid_bound;
      ok = ok && grid <= m.value && m.value <= a.value;
      if (fits) {
        ok = ok && grid == m.value;
        ++grid_equal;
      }
      values["grid"] = to_string(grid);
      values["ray_fits_grid"] = fits;
    }
    report.add({{"classes", desc}}, ok, values);
  }
  report.measured_constants["specs"] = report.cells.size();
  report.measured_constants["grid_equalities"] = grid_equal;
  return report;
}

}  // namespace torsion
